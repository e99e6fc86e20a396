#include "dpsi/bins.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <openssl/sha.h>

namespace dpsi {

void EncodingParams::validate(const PrimeField& field) const {
    if (u == 0 || t == 0 || t >= 64) throw ConfigError("encoding widths must be positive");
    if (u + t + 1 >= field.bit_length())
        throw ConfigError("encoding needs u + t < bit_length(p) - 1 (u=" + std::to_string(u) + ", t=" + std::to_string(t) +
                          ", bits=" + std::to_string(field.bit_length()) + ")");
    if (tag >> t) throw ConfigError("encoding tag does not fit in t bits");
}

HashTableParams HashTableParams::make(std::size_t h, std::size_t d) {
    HashTableParams p{h, d, 2 * d + 1};
    p.validate();
    return p;
}

void HashTableParams::validate() const {
    if (h < 1 || d < 1) throw ConfigError("hash table needs h >= 1 and d >= 1");
    if (n != 2 * d + 1) throw ConfigError("evaluation count must be n = 2d + 1");
}

FieldElement encode_element(u64 s, const EncodingParams& enc, const PrimeField& field) {
    if (enc.u >= 64 || (s >> enc.u) != 0)
        throw ParameterError("element " + std::to_string(s) + " is outside the universe [0, 2^" + std::to_string(enc.u) + ")");
    return FieldElement((s << enc.t) | enc.tag, field);
}

bool is_valid_encoding(u64 e, const EncodingParams& enc) {
    if (enc.u + enc.t < 64 && (e >> (enc.u + enc.t)) != 0) return false;
    return (e & ((u64{1} << enc.t) - 1)) == enc.tag;
}

std::optional<u64> decode_valid_root(FieldElement e, const EncodingParams& enc) {
    if (!is_valid_encoding(e.value(), enc)) return std::nullopt;
    return e.value() >> enc.t;
}

std::size_t assign_bin(FieldElement e, const HashTableParams& params) {
    std::uint8_t be[8];
    for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(e.value() >> (56 - 8 * i));
    std::uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(be, sizeof be, digest);
    u128 r = 0;
    for (auto byte : digest) r = (r * 256 + byte) % params.h;
    return static_cast<std::size_t>(r) + 1;
}

BinTable build_table(std::span<const u64> set, const HashTableParams& params, const EncodingParams& enc,
                     const Key& pad_seed, std::span<const FieldElement> xs, const PrimeField& field) {
    params.validate();
    BinTable table;
    table.bins.resize(params.h);
    table.real_mask.resize(params.h);
    std::set<u64> seen;
    for (u64 s : set) {
        if (!seen.insert(s).second) throw ParameterError("set element " + std::to_string(s) + " is repeated");
        auto e = encode_element(s, enc, field);
        std::size_t j = assign_bin(e, params);
        table.bins[j - 1].push_back(e);
        table.real_mask[j - 1].push_back(true);
    }
    std::set<u64> forbidden;
    for (auto x : xs) forbidden.insert(x.value());

    KeyedHash master(pad_seed);
    for (std::size_t j = 1; j <= params.h; ++j) {
        auto& bin = table.bins[j - 1];
        if (bin.size() > params.d)
            throw OverflowError("bin " + std::to_string(j) + " overflow: " + std::to_string(bin.size()) +
                                " elements exceed capacity d=" + std::to_string(params.d));
        KeyedHash stream(derive_key(master, j));
        u64 counter = 0;
        while (bin.size() < params.d) {
            auto r = prf_field(stream, ++counter, field);
            if (is_valid_encoding(r.value(), enc) || forbidden.count(r.value())) continue;
            bin.push_back(r);
            table.real_mask[j - 1].push_back(false);
        }
    }
    return table;
}

long double overflow_bound(std::size_t c, std::size_t h, std::size_t d) {
    if (c <= d) return 0.0L;
    if (h == 1) return 1.0L;
    const long double q = 1.0L / static_cast<long double>(h);
    const long double lq = std::log(q);
    const long double l1q = std::log1p(-q);
    const long double lc = std::lgamma(static_cast<long double>(c) + 1);
    long double tail = 0;
    for (std::size_t k = d + 1; k <= c; ++k) {
        long double lt = lc - std::lgamma(static_cast<long double>(k) + 1) - std::lgamma(static_cast<long double>(c - k) + 1) +
                         static_cast<long double>(k) * lq + static_cast<long double>(c - k) * l1q;
        long double term = std::exp(lt);
        tail += term;
        // Past the mode the terms shrink geometrically.
        if (static_cast<long double>(k) > c * q && term < tail * 1e-30L) break;
    }
    return static_cast<long double>(h) * tail;
}

std::size_t suggest_bin_count(std::size_t c, std::size_t d, double fail_prob) {
    if (c < 1 || d < 1) throw ConfigError("suggest_bin_count needs c >= 1 and d >= 1");
    if (!(fail_prob > 0.0 && fail_prob < 1.0)) throw ConfigError("fail_prob must lie in (0, 1)");
    for (std::size_t h = 1;; ++h)
        if (overflow_bound(c, h, d) <= static_cast<long double>(fail_prob)) return h;
}

std::vector<FieldElement> sample_eval_points(std::size_t n, const Key& seed, const EncodingParams& enc,
                                             const PrimeField& field) {
    if (n < 1) throw ParameterError("need at least one evaluation point");
    KeyedHash stream(seed);
    std::vector<FieldElement> xs;
    std::set<u64> taken;
    u64 counter = 0;
    while (xs.size() < n) {
        auto x = prf_field(stream, ++counter, field);
        if (is_valid_encoding(x.value(), enc) || !taken.insert(x.value()).second) continue;
        xs.push_back(x);
    }
    return xs;
}

std::vector<u64> parse_set_text(std::string_view text) {
    std::vector<u64> out;
    std::set<u64> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        if (line.empty()) continue;
        u64 v = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw FormatError("set file line " + std::to_string(line_no) + ": '" + std::string(line) + "' is not a decimal element");
        if (!seen.insert(v).second)
            throw FormatError("set file line " + std::to_string(line_no) + ": element " + std::to_string(v) + " is repeated");
        out.push_back(v);
    }
    return out;
}

std::vector<u64> read_set_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read set file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_set_text(ss.str());
}

}  // namespace dpsi

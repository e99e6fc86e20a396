#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dpsi/field.hpp"
#include "dpsi/prf.hpp"

namespace dpsi {

/// Shift-and-tag element encoding: e = s * 2^t + tag for s in [0, 2^u).
/// A root is valid when it lies below 2^(u+t) and its low t bits equal the tag.
/// A uniform field element is valid with probability 2^u / p.
struct EncodingParams {
    unsigned u = 32;
    unsigned t = 16;
    u64 tag = 0xA55A;

    /// Throws ConfigError unless u + t < bit_length(p) - 1 and tag < 2^t.
    void validate(const PrimeField& field) const;
    bool operator==(const EncodingParams&) const = default;
};

struct HashTableParams {
    std::size_t h = 1;  // bins
    std::size_t d = 1;  // capacity per bin
    std::size_t n = 3;  // evaluation points, always 2d + 1

    static HashTableParams make(std::size_t h, std::size_t d);
    void validate() const;
    bool operator==(const HashTableParams&) const = default;
};

/// Each bin padded to exactly d entries. real_mask stays with the owner.
struct BinTable {
    std::vector<std::vector<FieldElement>> bins;
    std::vector<std::vector<bool>> real_mask;
};

FieldElement encode_element(u64 s, const EncodingParams& enc, const PrimeField& field);
bool is_valid_encoding(u64 e, const EncodingParams& enc);
std::optional<u64> decode_valid_root(FieldElement e, const EncodingParams& enc);

/// (SHA-256 of the 8-byte big-endian encoding, as a big-endian integer) mod h, plus one.
std::size_t assign_bin(FieldElement e, const HashTableParams& params);

/// Throws OverflowError naming the bin when a bin receives more than d real elements,
/// ParameterError for out-of-universe or repeated elements.
BinTable build_table(std::span<const u64> set, const HashTableParams& params, const EncodingParams& enc,
                     const Key& pad_seed, std::span<const FieldElement> xs, const PrimeField& field);

/// h * Pr[Binomial(c, 1/h) > d], the union bound on overflow of any bin.
long double overflow_bound(std::size_t c, std::size_t h, std::size_t d);

/// Smallest h with overflow_bound(c, h, d) <= fail_prob.
std::size_t suggest_bin_count(std::size_t c, std::size_t d, double fail_prob);

/// n distinct field elements, none a valid encoding, deterministic in seed.
std::vector<FieldElement> sample_eval_points(std::size_t n, const Key& seed, const EncodingParams& enc,
                                             const PrimeField& field);

/// Set file: one decimal element per line, '#' starts a comment.
std::vector<u64> parse_set_text(std::string_view text);
std::vector<u64> read_set_file(const std::filesystem::path& path);

}  // namespace dpsi

#include "dpsi/prf.hpp"

#include <cstring>

namespace dpsi {

std::string_view to_string(KeyRole r) {
    switch (r) {
        case KeyRole::master_a: return "mk_A";
        case KeyRole::master_b: return "mk_B";
        case KeyRole::tk: return "tk";
        case KeyRole::tk1: return "tk1";
        case KeyRole::tk2: return "tk2";
        case KeyRole::bin: return "bin";
        case KeyRole::derived: return "derived";
    }
    return "?";
}

Key Key::from_seed(std::span<const std::uint8_t> seed, KeyRole role) {
    std::uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(seed.data(), seed.size(), digest);
    Bytes b;
    std::memcpy(b.data(), digest, kSize);
    return Key(b, role);
}

Key Key::from_seed(std::uint64_t seed, KeyRole role) {
    std::array<std::uint8_t, 8> be;
    for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
    return from_seed(be, role);
}

Key Key::from_hex(std::string_view hex, KeyRole role) {
    if (hex.size() != 2 * kSize) throw ParameterError("key hex must be 32 characters");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParameterError("key hex contains a non-hex character");
    };
    Bytes b;
    for (std::size_t i = 0; i < kSize; ++i) b[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return Key(b, role);
}

std::string Key::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * kSize);
    for (auto byte : bytes_) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

KeyedHash::KeyedHash(const Key& key) {
    std::uint8_t pad[SHA256_CBLOCK];
    std::memset(pad, 0x36, sizeof pad);
    for (std::size_t i = 0; i < Key::kSize; ++i) pad[i] ^= key.bytes()[i];
    SHA256_Init(&inner_);
    SHA256_Update(&inner_, pad, sizeof pad);
    std::memset(pad, 0x5c, sizeof pad);
    for (std::size_t i = 0; i < Key::kSize; ++i) pad[i] ^= key.bytes()[i];
    SHA256_Init(&outer_);
    SHA256_Update(&outer_, pad, sizeof pad);
}

KeyedHash::Digest KeyedHash::operator()(std::span<const std::uint8_t> message) const {
    Digest inner_digest;
    SHA256_CTX ctx = inner_;
    SHA256_Update(&ctx, message.data(), message.size());
    SHA256_Final(inner_digest.data(), &ctx);
    Digest out;
    ctx = outer_;
    SHA256_Update(&ctx, inner_digest.data(), inner_digest.size());
    SHA256_Final(out.data(), &ctx);
    return out;
}

namespace {

std::array<std::uint8_t, 10> prf_message(std::uint8_t tag, std::uint64_t index, std::uint8_t retry) {
    std::array<std::uint8_t, 10> m;
    m[0] = tag;
    for (int i = 0; i < 8; ++i) m[1 + i] = static_cast<std::uint8_t>(index >> (56 - 8 * i));
    m[9] = retry;
    return m;
}

FieldElement to_field(const KeyedHash::Digest& d, const PrimeField& field) {
    u128 v = 0;
    for (int i = 0; i < 16; ++i) v = v << 8 | d[i];
    return FieldElement::raw(static_cast<u64>(v % field.modulus()), field.modulus());
}

}  // namespace

Key derive_key(const KeyedHash& parent, std::uint64_t index) {
    auto d = parent(prf_message(kDeriveTag, index, 0));
    Key::Bytes b;
    std::memcpy(b.data(), d.data(), Key::kSize);
    return Key(b, KeyRole::derived);
}

Key derive_key(const Key& parent, std::uint64_t index) { return derive_key(KeyedHash(parent), index); }

FieldElement prf_field(const KeyedHash& key, std::uint64_t index, const PrimeField& field) {
    return to_field(key(prf_message(kFieldTag, index, 0)), field);
}

FieldElement prf_field(const Key& key, std::uint64_t index, const PrimeField& field) {
    return prf_field(KeyedHash(key), index, field);
}

FieldElement prf_field_nonzero(const KeyedHash& key, std::uint64_t index, const PrimeField& field) {
    for (unsigned retry = 0; retry < 256; ++retry) {
        auto e = to_field(key(prf_message(kFieldTag, index, static_cast<std::uint8_t>(retry))), field);
        if (!e.is_zero()) return e;
    }
    throw DomainError("PRF produced zero on every retry");
}

FieldElement prf_field_nonzero(const Key& key, std::uint64_t index, const PrimeField& field) {
    return prf_field_nonzero(KeyedHash(key), index, field);
}

BlindingMatrix expand_blinding(const Key& mk, std::size_t h, std::size_t n, bool nonzero, const PrimeField& field,
                               Party owner) {
    if (h == 0 || n == 0) throw ParameterError("blinding matrix needs h, n >= 1");
    BlindingMatrix out{FieldMatrix(h, n, field.modulus()), owner};
    KeyedHash master(mk);
    for (std::size_t j = 1; j <= h; ++j) {
        KeyedHash bin(derive_key(master, j));
        for (std::size_t i = 1; i <= n; ++i) {
            auto z = nonzero ? prf_field_nonzero(bin, i, field) : prf_field(bin, i, field);
            out.z.raw(j - 1, i - 1) = z.value();
        }
    }
    return out;
}

}  // namespace dpsi

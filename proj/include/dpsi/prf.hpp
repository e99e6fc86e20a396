#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <openssl/sha.h>

#include "dpsi/field.hpp"
#include "dpsi/matrix.hpp"

namespace dpsi {

enum class KeyRole : std::uint8_t { master_a, master_b, tk, tk1, tk2, bin, derived };

std::string_view to_string(KeyRole r);

/// 128-bit secret key.
class Key {
public:
    static constexpr std::size_t kSize = 16;
    using Bytes = std::array<std::uint8_t, kSize>;

    Key() = default;
    explicit Key(const Bytes& bytes, KeyRole role = KeyRole::derived) : bytes_(bytes), role_(role) {}

    /// First 16 bytes of SHA-256(seed); used to turn a CLI/test seed into a root key.
    static Key from_seed(std::span<const std::uint8_t> seed, KeyRole role = KeyRole::derived);
    static Key from_seed(std::uint64_t seed, KeyRole role = KeyRole::derived);
    static Key from_hex(std::string_view hex, KeyRole role = KeyRole::derived);

    const Bytes& bytes() const { return bytes_; }
    KeyRole role() const { return role_; }
    Key with_role(KeyRole role) const { return Key(bytes_, role); }
    std::string hex() const;

    /// Byte equality; the role tag is local metadata.
    bool operator==(const Key& o) const { return bytes_ == o.bytes_; }

private:
    Bytes bytes_{};
    KeyRole role_ = KeyRole::derived;
};

/// HMAC-SHA-256 with the key's inner and outer pad states precomputed, so
/// many messages under one key cost two compressions each.
class KeyedHash {
public:
    using Digest = std::array<std::uint8_t, 32>;

    explicit KeyedHash(const Key& key);
    Digest operator()(std::span<const std::uint8_t> message) const;

private:
    SHA256_CTX inner_;
    SHA256_CTX outer_;
};

inline constexpr std::uint8_t kDeriveTag = 0x01;
inline constexpr std::uint8_t kFieldTag = 0x02;

/// Child key: first 16 bytes of HMAC(parent, 0x01 || be64(index) || 0x00).
Key derive_key(const Key& parent, std::uint64_t index);
Key derive_key(const KeyedHash& parent, std::uint64_t index);

/// HMAC(key, 0x02 || be64(index) || 0x00), first 16 bytes as a big-endian
/// 128-bit integer, reduced mod p. The reduction bias is at most 2^128 mod p / 2^128.
FieldElement prf_field(const Key& key, std::uint64_t index, const PrimeField& field);
FieldElement prf_field(const KeyedHash& key, std::uint64_t index, const PrimeField& field);

/// prf_field, but on a zero output the trailing retry byte is incremented until nonzero.
FieldElement prf_field_nonzero(const Key& key, std::uint64_t index, const PrimeField& field);
FieldElement prf_field_nonzero(const KeyedHash& key, std::uint64_t index, const PrimeField& field);

struct BlindingMatrix {
    FieldMatrix z;
    Party owner = Party::A;
};

/// z[j][i] = PRF(derive_key(mk, j), i) for 1 <= j <= h, 1 <= i <= n (stored 0-based).
/// PRF work is never tallied.
BlindingMatrix expand_blinding(const Key& mk, std::size_t h, std::size_t n, bool nonzero, const PrimeField& field,
                               Party owner);

}  // namespace dpsi

#pragma once

#include <cstdint>
#include <string>

#include "dpsi/counters.hpp"
#include "dpsi/errors.hpp"

namespace dpsi {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(u64 n);

/// Public prime modulus. Residues are held in 64-bit words, so p < 2^63.
class PrimeField {
public:
    static constexpr u64 kMersenne61 = (u64{1} << 61) - 1;

    explicit PrimeField(u64 p);
    static PrimeField mersenne61() { return PrimeField(kMersenne61); }
    static PrimeField from_decimal(const std::string& text);

    u64 modulus() const { return p_; }
    /// ceil(log2 p)
    unsigned bit_length() const { return bits_; }
    /// Serialized width of one element: 8 for the default prime, ceil(bits/8) otherwise.
    unsigned byte_width() const { return width_; }
    bool is_mersenne61() const { return m61_; }
    /// How many products of two residues can be summed in 128 bits without overflow.
    unsigned lazy_terms() const { return lazy_; }

    u64 reduce(u128 x) const {
        if (m61_) {
            // x >> 61 < 2^67, so two folds bring the value below 2^61 + 2^7.
            u128 y = (x & kMersenne61) + (x >> 61);
            y = (y & kMersenne61) + (y >> 61);
            u64 r = static_cast<u64>(y);
            if (r >= kMersenne61) r -= kMersenne61;
            return r;
        }
        return static_cast<u64>(x % p_);
    }
    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (p_ - b); }
    u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
    u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
    u64 pow(u64 a, u64 e) const;
    /// Throws DomainError on zero.
    u64 inv(u64 a) const;

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

private:
    u64 p_;
    unsigned bits_;
    unsigned width_;
    unsigned lazy_;
    bool m61_;
};

/// Canonical residue tagged with the modulus of the field it belongs to.
class FieldElement {
public:
    FieldElement() = default;
    FieldElement(u64 value, const PrimeField& field) : value_(value % field.modulus()), modulus_(field.modulus()) {}
    static FieldElement raw(u64 canonical, u64 modulus) {
        FieldElement e;
        e.value_ = canonical;
        e.modulus_ = modulus;
        return e;
    }

    u64 value() const { return value_; }
    u64 modulus() const { return modulus_; }
    bool is_zero() const { return value_ == 0; }

    bool operator==(const FieldElement&) const = default;
    auto operator<=>(const FieldElement&) const = default;

private:
    u64 value_ = 0;
    u64 modulus_ = 0;
};

/// Field arithmetic bound to a tally. Every operation checks that operands
/// share the field and charges the attached Tally, if any.
class Arith {
public:
    explicit Arith(const PrimeField& field, Tally* tally = nullptr, Tally* nested = nullptr)
        : field_(field), tally_(tally), nested_(nested) {}

    const PrimeField& field() const { return field_; }
    Tally* tally() const { return tally_; }

    FieldElement element(u64 v) const { return FieldElement(v, field_); }
    FieldElement zero() const { return FieldElement::raw(0, field_.modulus()); }
    FieldElement one() const { return FieldElement::raw(1, field_.modulus()); }

    FieldElement add(FieldElement a, FieldElement b) const;
    FieldElement sub(FieldElement a, FieldElement b) const;
    FieldElement mul(FieldElement a, FieldElement b) const;
    FieldElement inv(FieldElement a) const;
    FieldElement pow(FieldElement a, u64 e) const;

    /// Arith for work done inside an interpolation or factorization: field
    /// operations go to the nested tally when one is attached.
    Arith nested() const { return Arith(field_, nested_ ? nested_ : tally_, nested_); }
    /// Arith that counts nothing.
    Arith uncounted() const { return Arith(field_); }

    void charge(u64 adds, u64 muls) const {
        if (tally_) {
            tally_->adds += adds;
            tally_->muls += muls;
        }
    }
    void charge_inv(u64 invs = 1) const {
        if (tally_) tally_->invs += invs;
    }
    void note_interpolation() const {
        if (tally_) ++tally_->interpolations;
    }
    void note_factorization() const {
        if (tally_) ++tally_->factorizations;
    }

    void check(FieldElement a) const {
        if (a.modulus() != field_.modulus()) throw ParameterError("field element belongs to a different field");
    }

private:
    PrimeField field_;
    Tally* tally_;
    Tally* nested_;
};

}  // namespace dpsi

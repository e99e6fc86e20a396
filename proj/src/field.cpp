#include "dpsi/field.hpp"

#include <algorithm>
#include <charconv>

namespace dpsi {

std::string_view to_string(Party p) {
    switch (p) {
        case Party::A: return "A";
        case Party::B: return "B";
        case Party::C: return "C";
    }
    return "?";
}

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::setup: return "setup";
        case Phase::outsource: return "outsource";
        case Phase::online: return "online";
    }
    return "?";
}

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % small == 0) return n == small;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These twelve bases are a deterministic witness set below 3.3 * 10^24.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(u64 p) : p_(p) {
    if (p >= (u64{1} << 63)) throw ParameterError("prime modulus must be below 2^63");
    if (!is_prime_u64(p)) throw ParameterError("modulus " + std::to_string(p) + " is not prime");
    bits_ = 64 - static_cast<unsigned>(__builtin_clzll(p - 1));
    m61_ = p == kMersenne61;
    width_ = m61_ ? 8 : (bits_ + 7) / 8;
    u128 sq = static_cast<u128>(p - 1) * (p - 1);
    u128 room = ~u128{0} - (p - 1);
    u128 k = room / sq;
    lazy_ = static_cast<unsigned>(std::min<u128>(k, 1u << 16));
}

PrimeField PrimeField::from_decimal(const std::string& text) {
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("prime '" + text + "' is not a decimal 64-bit integer");
    try {
        return PrimeField(v);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

u64 PrimeField::pow(u64 a, u64 e) const {
    u64 r = 1 % p_;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

u64 PrimeField::inv(u64 a) const {
    if (a % p_ == 0) throw DomainError("inverse of zero");
    // Extended Euclid. p < 2^63 keeps remainders and Bezout coefficients within int64.
    std::int64_t t = 0, new_t = 1;
    std::uint64_t r = p_, new_r = a % p_;
    while (new_r != 0) {
        std::uint64_t q = r / new_r;
        std::int64_t tmp = t - static_cast<std::int64_t>(q) * new_t;
        t = new_t;
        new_t = tmp;
        std::uint64_t rem = r - q * new_r;
        r = new_r;
        new_r = rem;
    }
    return t < 0 ? static_cast<u64>(t + static_cast<std::int64_t>(p_)) : static_cast<u64>(t);
}

FieldElement Arith::add(FieldElement a, FieldElement b) const {
    check(a);
    check(b);
    charge(1, 0);
    return FieldElement::raw(field_.add(a.value(), b.value()), field_.modulus());
}

FieldElement Arith::sub(FieldElement a, FieldElement b) const {
    check(a);
    check(b);
    charge(1, 0);
    return FieldElement::raw(field_.sub(a.value(), b.value()), field_.modulus());
}

FieldElement Arith::mul(FieldElement a, FieldElement b) const {
    check(a);
    check(b);
    charge(0, 1);
    return FieldElement::raw(field_.mul(a.value(), b.value()), field_.modulus());
}

FieldElement Arith::inv(FieldElement a) const {
    check(a);
    if (a.is_zero()) throw DomainError("inverse of zero field element (a blinding value must be nonzero)");
    charge_inv();
    return FieldElement::raw(field_.inv(a.value()), field_.modulus());
}

FieldElement Arith::pow(FieldElement a, u64 e) const {
    check(a);
    FieldElement result = one();
    FieldElement base = a;
    while (e) {
        if (e & 1) result = mul(result, base);
        e >>= 1;
        if (e) base = mul(base, base);
    }
    return result;
}

}  // namespace dpsi

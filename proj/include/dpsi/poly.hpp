#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dpsi/field.hpp"

namespace dpsi {

class Key;

/// Dense univariate polynomial over F_p; coefficient k multiplies x^k.
/// Canonical form has no trailing zero coefficients, so the zero polynomial is empty.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(const PrimeField& field) : modulus_(field.modulus()) {}
    Polynomial(const PrimeField& field, std::vector<u64> coeffs);
    Polynomial(u64 modulus, std::vector<u64> canonical_coeffs);

    static Polynomial from_elements(const PrimeField& field, std::span<const FieldElement> coeffs);
    static Polynomial constant(const PrimeField& field, u64 c) { return Polynomial(field, std::vector<u64>{c}); }
    static Polynomial monomial(const PrimeField& field, std::size_t k);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }
    u64 modulus() const { return modulus_; }

    FieldElement coeff(std::size_t k) const { return FieldElement::raw(k < c_.size() ? c_[k] : 0, modulus_); }
    FieldElement leading() const { return coeff(c_.empty() ? 0 : c_.size() - 1); }
    std::span<const u64> coeffs() const { return c_; }

    bool operator==(const Polynomial&) const = default;

private:
    void trim();

    u64 modulus_ = 0;
    std::vector<u64> c_;
};

/// Evaluation vector xs and values ys = f(xs).
struct PointValuePoly {
    std::vector<FieldElement> xs;
    std::vector<FieldElement> ys;
};

/// prod (x - r); one mul and one add per coefficient touched.
Polynomial poly_from_roots(std::span<const FieldElement> roots, const Arith& arith);

/// Horner's rule: exactly deg f multiplications and deg f additions.
FieldElement eval_horner(const Polynomial& f, FieldElement x, const Arith& arith);

Polynomial poly_add(const Polynomial& f, const Polynomial& g, const Arith& arith);
Polynomial poly_sub(const Polynomial& f, const Polynomial& g, const Arith& arith);
Polynomial poly_scale(const Polynomial& f, FieldElement s, const Arith& arith);
/// Schoolbook product.
Polynomial poly_mul(const Polynomial& f, const Polynomial& g, const Arith& arith);
/// f = q * g + r with deg r < deg g. Throws ParameterError when g is zero.
std::pair<Polynomial, Polynomial> poly_divmod(const Polynomial& f, const Polynomial& g, const Arith& arith);
Polynomial make_monic(const Polynomial& f, const Arith& arith);
Polynomial derivative(const Polynomial& f, const Arith& arith);
/// Monic gcd. Throws ParameterError when both inputs are zero.
Polynomial poly_gcd(const Polynomial& f, const Polynomial& g, const Arith& arith);
/// f / gcd(f, f'), monic. Throws ParameterError on zero.
Polynomial squarefree_part(const Polynomial& f, const Arith& arith);
/// base^e mod m, with m of positive degree.
Polynomial poly_powmod(const Polynomial& base, u64 e, const Polynomial& m, const Arith& arith);

/// Distinct roots of f in F_p, ascending. Counts one factorization on `arith`;
/// the field operations inside are charged to arith.nested(). The splitting
/// randomness is a deterministic stream seeded by `split_seed`.
std::vector<FieldElement> find_roots(const Polynomial& f, const Arith& arith, u64 split_seed = 0x5eed);

/// {c in candidates : f(c) = 0}, ascending and deduplicated.
std::vector<FieldElement> roots_by_candidates(const Polynomial& f, std::span<const FieldElement> candidates,
                                              const Arith& arith);

/// Degree-exact pseudorandom polynomial: a_k = PRF(seed, k) for k < degree,
/// leading coefficient from the nonzero PRF variant. Not tallied.
Polynomial random_poly(const Key& seed, std::size_t degree, const PrimeField& field);

/// Lagrange basis for a fixed evaluation vector. Building costs O(n^2) field
/// operations once; each interpolation afterwards is n^2 multiply-adds.
class LagrangeBasis {
public:
    /// Throws ParameterError when xs is empty or has repeated values.
    LagrangeBasis(std::span<const FieldElement> xs, const Arith& arith);

    std::size_t size() const { return xs_.size(); }
    std::span<const FieldElement> points() const { return xs_; }

    /// Unique polynomial of degree < n through (xs[i], ys[i]). Counts one
    /// interpolation on `arith`; the multiply-adds go to arith.nested().
    Polynomial interpolate(std::span<const u64> ys, const Arith& arith) const;
    Polynomial interpolate(std::span<const FieldElement> ys, const Arith& arith) const;

private:
    u64 modulus_;
    std::vector<FieldElement> xs_;
    std::vector<u64> basis_;  // n x n, row i holds the coefficients of L_i
};

/// Lagrange interpolation through all pairs. Counts one interpolation.
Polynomial interpolate(const PointValuePoly& points, const Arith& arith);

}  // namespace dpsi

#include "dpsi/poly.hpp"

#include <algorithm>
#include <random>

#include "dpsi/prf.hpp"

namespace dpsi {

namespace {

// Field-operation counts accumulated by the raw kernels below and charged in bulk.
struct Work {
    u64 adds = 0;
    u64 muls = 0;
    u64 invs = 0;

    void charge(const Arith& arith) const {
        arith.charge(adds, muls);
        if (invs) arith.charge_inv(invs);
    }
};

void trim(std::vector<u64>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

// Sum of products with a single reduction every lazy_terms() products.
class LazyDot {
public:
    explicit LazyDot(const PrimeField& f) : f_(f), limit_(f.lazy_terms()) {}

    void add(u64 a, u64 b) {
        if (count_ == limit_) {
            acc_ = f_.reduce(acc_);
            count_ = 0;
        }
        acc_ += static_cast<u128>(a) * b;
        ++count_;
    }
    void add_value(u64 a) { add(a, 1); }
    u64 value() const { return f_.reduce(acc_); }

private:
    const PrimeField& f_;
    unsigned limit_;
    unsigned count_ = 0;
    u128 acc_ = 0;
};

std::vector<u64> mul_raw(std::span<const u64> a, std::span<const u64> b, const PrimeField& f, Work& w) {
    if (a.empty() || b.empty()) return {};
    std::vector<u64> out(a.size() + b.size() - 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        LazyDot dot(f);
        std::size_t lo = k >= b.size() - 1 ? k - (b.size() - 1) : 0;
        std::size_t hi = std::min(k, a.size() - 1);
        for (std::size_t i = lo; i <= hi; ++i) dot.add(a[i], b[k - i]);
        out[k] = dot.value();
        w.muls += hi - lo + 1;
        w.adds += hi - lo;
    }
    return out;
}

std::vector<u64> square_raw(std::span<const u64> a, const PrimeField& f, Work& w) {
    if (a.empty()) return {};
    std::size_t m = a.size();
    std::vector<u64> out(2 * m - 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        LazyDot cross(f);
        std::size_t lo = k >= m - 1 ? k - (m - 1) : 0;
        std::size_t i = lo;
        for (; 2 * i < k; ++i) cross.add(a[i], a[k - i]);
        u64 v = cross.value();
        v = f.add(v, v);
        if (2 * i == k) v = f.add(v, f.mul(a[i], a[i]));
        out[k] = v;
        w.muls += (k - lo) / 2 + 1;
        w.adds += (k - lo) / 2 + 1;
    }
    return out;
}

// Remainder of r modulo a monic m (deg m = m.size() - 1 >= 1), by long division.
void reduce_monic(std::vector<u64>& r, std::span<const u64> m, const PrimeField& f, Work& w) {
    std::size_t k = m.size() - 1;
    for (std::size_t top = r.size(); top-- > k;) {
        u64 c = r[top];
        if (c == 0) continue;
        std::size_t base = top - k;
        for (std::size_t i = 0; i < k; ++i) r[base + i] = f.sub(r[base + i], f.mul(c, m[i]));
        w.muls += k;
        w.adds += k;
    }
    if (r.size() > k) r.resize(k);
}

// Reduction modulo a fixed monic m of degree k through the table x^t mod m,
// t = k .. 2k-2. Each reduction is then k independent dot products.
class MonicReducer {
public:
    MonicReducer(std::span<const u64> m, const PrimeField& f, Work& w) : f_(f), m_(m.begin(), m.end()), k_(m.size() - 1) {
        rows_ = k_ >= 1 ? k_ - 1 : 0;
        table_.assign(k_ * std::max<std::size_t>(rows_, 1), 0);
        if (rows_ == 0) return;
        std::vector<u64> cur(k_);
        for (std::size_t i = 0; i < k_; ++i) cur[i] = f.neg(m_[i]);  // x^k mod m
        w.adds += k_;
        for (std::size_t t = 0; t < rows_; ++t) {
            for (std::size_t i = 0; i < k_; ++i) table_[i * rows_ + t] = cur[i];
            if (t + 1 == rows_) break;
            u64 top = cur[k_ - 1];
            for (std::size_t i = k_ - 1; i > 0; --i) cur[i] = f.sub(cur[i - 1], f.mul(top, m_[i]));
            cur[0] = f.neg(f.mul(top, m_[0]));
            w.muls += k_;
            w.adds += k_;
        }
    }

    std::size_t degree() const { return k_; }

    // r <- r^2 mod m for r with at most k coefficients. `sq` is scratch space.
    // Same operation count as square_raw followed by reduce.
    void square(std::vector<u64>& r, std::vector<u64>& sq, Work& w) const {
        std::size_t m = r.size();
        if (m == 0) return;
        if (2 * m + 1 > f_.lazy_terms()) {
            r = square_raw(r, f_, w);
            reduce(r, w);
            return;
        }
        std::size_t len = 2 * m - 1;
        sq.resize(len);
        const u64* a = r.data();
        for (std::size_t kk = 0; kk < len; ++kk) {
            std::size_t lo = kk >= m - 1 ? kk - (m - 1) : 0;
            u128 cross = 0;
            std::size_t i = lo;
            for (; 2 * i < kk; ++i) cross += static_cast<u128>(a[i]) * a[kk - i];
            u128 acc = cross + cross;
            if (2 * i == kk) acc += static_cast<u128>(a[i]) * a[i];
            sq[kk] = f_.reduce(acc);
            w.muls += (kk - lo) / 2 + 1;
            w.adds += (kk - lo) / 2 + 1;
        }
        if (len <= k_) {
            r.assign(sq.begin(), sq.end());
            return;
        }
        std::size_t extra = len - k_;
        r.resize(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            u128 acc = sq[i];
            const u64* row = &table_[i * rows_];
            for (std::size_t t = 0; t < extra; ++t) acc += static_cast<u128>(sq[k_ + t]) * row[t];
            r[i] = f_.reduce(acc);
        }
        w.muls += k_ * extra;
        w.adds += k_ * extra;
    }

    // r has at most 2k - 1 coefficients.
    void reduce(std::vector<u64>& r, Work& w) const {
        if (r.size() <= k_) return;
        if (r.size() == k_ + 1) {
            // A single overflow coefficient: one division step.
            u64 c = r[k_];
            for (std::size_t i = 0; i < k_; ++i) r[i] = f_.sub(r[i], f_.mul(c, m_[i]));
            r.resize(k_);
            w.muls += k_;
            w.adds += k_;
            return;
        }
        std::size_t extra = r.size() - k_;
        std::vector<u64> out(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            LazyDot dot(f_);
            dot.add_value(r[i]);
            const u64* row = &table_[i * rows_];
            for (std::size_t t = 0; t < extra; ++t) dot.add(r[k_ + t], row[t]);
            out[i] = dot.value();
        }
        w.muls += k_ * extra;
        w.adds += k_ * extra;
        r = std::move(out);
    }

private:
    const PrimeField& f_;
    std::vector<u64> m_;
    std::size_t k_;
    std::size_t rows_;
    std::vector<u64> table_;  // k rows of (k - 1): coefficient i of x^(k+t) mod m at [i * rows_ + t]
};

std::vector<u64> divmod_raw(std::vector<u64>& r, std::span<const u64> g, const PrimeField& f, Work& w) {
    // r <- r mod g, returns the quotient. g nonzero, canonical.
    std::size_t dg = g.size() - 1;
    if (r.size() < g.size()) return {};
    u64 lead_inv = g.back() == 1 ? 1 : f.inv(g.back());
    if (g.back() != 1) ++w.invs;
    std::vector<u64> q(r.size() - dg);
    for (std::size_t top = r.size(); top-- > dg;) {
        u64 c = r[top];
        if (g.back() != 1) {
            c = f.mul(c, lead_inv);
            ++w.muls;
        }
        q[top - dg] = c;
        if (c == 0) continue;
        std::size_t base = top - dg;
        for (std::size_t i = 0; i < dg; ++i) r[base + i] = f.sub(r[base + i], f.mul(c, g[i]));
        r[top] = 0;
        w.muls += dg;
        w.adds += dg;
    }
    r.resize(dg);
    trim(r);
    trim(q);
    return q;
}

void require_same(const Polynomial& f, const Arith& arith) {
    if (f.modulus() != arith.field().modulus()) throw ParameterError("polynomial belongs to a different field");
}

}  // namespace

Polynomial::Polynomial(const PrimeField& field, std::vector<u64> coeffs) : modulus_(field.modulus()), c_(std::move(coeffs)) {
    for (auto& c : c_) c %= modulus_;
    trim();
}

Polynomial::Polynomial(u64 modulus, std::vector<u64> canonical_coeffs) : modulus_(modulus), c_(std::move(canonical_coeffs)) {
    trim();
}

Polynomial Polynomial::from_elements(const PrimeField& field, std::span<const FieldElement> coeffs) {
    std::vector<u64> v;
    v.reserve(coeffs.size());
    for (auto e : coeffs) {
        if (e.modulus() != field.modulus()) throw ParameterError("coefficient belongs to a different field");
        v.push_back(e.value());
    }
    return Polynomial(field.modulus(), std::move(v));
}

Polynomial Polynomial::monomial(const PrimeField& field, std::size_t k) {
    std::vector<u64> v(k + 1, 0);
    v[k] = 1 % field.modulus();
    return Polynomial(field.modulus(), std::move(v));
}

void Polynomial::trim() { dpsi::trim(c_); }

Polynomial poly_from_roots(std::span<const FieldElement> roots, const Arith& arith) {
    const PrimeField& f = arith.field();
    std::vector<u64> c{1};
    c.reserve(roots.size() + 1);
    for (auto r : roots) {
        arith.check(r);
        // (c_0 + ... + c_m x^m)(x - r)
        std::size_t m = c.size() - 1;
        c.push_back(c[m]);
        for (std::size_t k = m; k > 0; --k) c[k] = f.sub(c[k - 1], f.mul(r.value(), c[k]));
        c[0] = f.neg(f.mul(r.value(), c[0]));
        arith.charge(m + 1, m + 1);
    }
    return Polynomial(f.modulus(), std::move(c));
}

FieldElement eval_horner(const Polynomial& p, FieldElement x, const Arith& arith) {
    require_same(p, arith);
    arith.check(x);
    const PrimeField& f = arith.field();
    auto c = p.coeffs();
    if (c.empty()) return arith.zero();
    u64 acc = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = f.add(f.mul(acc, x.value()), c[k]);
    arith.charge(c.size() - 1, c.size() - 1);
    return FieldElement::raw(acc, f.modulus());
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b, const Arith& arith) {
    require_same(a, arith);
    require_same(b, arith);
    const PrimeField& f = arith.field();
    auto x = a.coeffs();
    auto y = b.coeffs();
    std::vector<u64> out(std::max(x.size(), y.size()));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.add(k < x.size() ? x[k] : 0, k < y.size() ? y[k] : 0);
    arith.charge(std::min(x.size(), y.size()), 0);
    return Polynomial(f.modulus(), std::move(out));
}

Polynomial poly_sub(const Polynomial& a, const Polynomial& b, const Arith& arith) {
    require_same(a, arith);
    require_same(b, arith);
    const PrimeField& f = arith.field();
    auto x = a.coeffs();
    auto y = b.coeffs();
    std::vector<u64> out(std::max(x.size(), y.size()));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.sub(k < x.size() ? x[k] : 0, k < y.size() ? y[k] : 0);
    arith.charge(y.size(), 0);
    return Polynomial(f.modulus(), std::move(out));
}

Polynomial poly_scale(const Polynomial& a, FieldElement s, const Arith& arith) {
    require_same(a, arith);
    arith.check(s);
    const PrimeField& f = arith.field();
    std::vector<u64> out(a.coeffs().begin(), a.coeffs().end());
    for (auto& c : out) c = f.mul(c, s.value());
    arith.charge(0, out.size());
    return Polynomial(f.modulus(), std::move(out));
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b, const Arith& arith) {
    require_same(a, arith);
    require_same(b, arith);
    Work w;
    auto out = mul_raw(a.coeffs(), b.coeffs(), arith.field(), w);
    w.charge(arith);
    return Polynomial(arith.field().modulus(), std::move(out));
}

std::pair<Polynomial, Polynomial> poly_divmod(const Polynomial& a, const Polynomial& b, const Arith& arith) {
    require_same(a, arith);
    require_same(b, arith);
    if (b.is_zero()) throw ParameterError("polynomial division by zero");
    Work w;
    std::vector<u64> r(a.coeffs().begin(), a.coeffs().end());
    auto q = divmod_raw(r, b.coeffs(), arith.field(), w);
    w.charge(arith);
    u64 p = arith.field().modulus();
    return {Polynomial(p, std::move(q)), Polynomial(p, std::move(r))};
}

Polynomial make_monic(const Polynomial& a, const Arith& arith) {
    require_same(a, arith);
    if (a.is_zero() || a.is_monic()) return a;
    return poly_scale(a, arith.inv(a.leading()), arith);
}

Polynomial derivative(const Polynomial& a, const Arith& arith) {
    require_same(a, arith);
    const PrimeField& f = arith.field();
    auto c = a.coeffs();
    if (c.size() <= 1) return Polynomial(f);
    std::vector<u64> out(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) out[k - 1] = f.mul(k % f.modulus(), c[k]);
    arith.charge(0, out.size());
    return Polynomial(f.modulus(), std::move(out));
}

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b, const Arith& arith) {
    require_same(a, arith);
    require_same(b, arith);
    if (a.is_zero() && b.is_zero()) throw ParameterError("gcd of two zero polynomials");
    const PrimeField& f = arith.field();
    Work w;
    std::vector<u64> x(a.coeffs().begin(), a.coeffs().end());
    std::vector<u64> y(b.coeffs().begin(), b.coeffs().end());
    if (x.size() < y.size()) std::swap(x, y);
    while (!y.empty()) {
        divmod_raw(x, y, f, w);
        std::swap(x, y);
    }
    w.charge(arith);
    return make_monic(Polynomial(f.modulus(), std::move(x)), arith);
}

Polynomial squarefree_part(const Polynomial& a, const Arith& arith) {
    require_same(a, arith);
    if (a.is_zero()) throw ParameterError("square-free part of the zero polynomial");
    Polynomial g = poly_gcd(a, derivative(a, arith), arith);
    return make_monic(poly_divmod(a, g, arith).first, arith);
}

Polynomial poly_powmod(const Polynomial& base, u64 e, const Polynomial& m, const Arith& arith) {
    require_same(base, arith);
    require_same(m, arith);
    if (m.degree() < 1) throw ParameterError("powmod needs a modulus of positive degree");
    const PrimeField& f = arith.field();
    Work w;
    Polynomial mm = make_monic(m, arith);
    std::vector<u64> b(base.coeffs().begin(), base.coeffs().end());
    reduce_monic(b, mm.coeffs(), f, w);
    trim(b);
    MonicReducer reducer(mm.coeffs(), f, w);
    std::size_t k = reducer.degree();
    bool linear = b.size() <= 2;

    std::vector<u64> result{1};
    std::vector<u64> scratch;
    result.reserve(2 * k + 1);
    for (int bit = 63; bit >= 0; --bit) {
        if (result.size() > 1 || result[0] != 1) {
            reducer.square(result, scratch, w);
        }
        if (!(e >> bit & 1)) continue;
        if (linear) {
            // result * (b0 + b1 x): shift-and-add, then at most one overflow coefficient.
            u64 b0 = b.empty() ? 0 : b[0];
            u64 b1 = b.size() > 1 ? b[1] : 0;
            std::size_t m = result.size();
            result.push_back(0);
            for (std::size_t i = m; i-- > 0;) {
                u64 r = result[i];
                result[i + 1] = f.add(result[i + 1], f.mul(r, b1));
                result[i] = f.mul(r, b0);
            }
            w.muls += 2 * m;
            w.adds += m;
        } else {
            result = mul_raw(result, b, f, w);
        }
        reducer.reduce(result, w);
        if (result.size() > k) reduce_monic(result, mm.coeffs(), f, w);
    }
    w.charge(arith);
    trim(result);
    return Polynomial(f.modulus(), std::move(result));
}

std::vector<FieldElement> find_roots(const Polynomial& poly, const Arith& arith, u64 split_seed) {
    require_same(poly, arith);
    if (poly.is_zero()) throw ParameterError("roots of the zero polynomial");
    arith.note_factorization();
    const Arith inner = arith.nested();
    const PrimeField& f = arith.field();
    const u64 p = f.modulus();
    if (poly.degree() == 0) return {};

    // gcd with x^p - x already discards multiplicity; the square-free step only
    // shrinks the modulus, and is skipped when f' vanishes (f a p-th power).
    Polynomial df = derivative(poly, inner);
    Polynomial r = df.is_zero() ? make_monic(poly, inner) : squarefree_part(poly, inner);
    if (r.degree() <= 0) return {};

    std::vector<u64> roots;
    if (p == 2) {
        for (u64 v : {0ULL, 1ULL})
            if (eval_horner(r, FieldElement::raw(v, p), inner).is_zero()) roots.push_back(v);
    } else {
        Polynomial x = Polynomial::monomial(f, 1);
        Polynomial xp = poly_powmod(x, p, r, inner);
        Polynomial split = poly_gcd(r, poly_sub(xp, x, inner), inner);

        std::mt19937_64 rng(split_seed);
        std::vector<Polynomial> stack{split};
        Polynomial one = Polynomial::constant(f, 1);
        while (!stack.empty()) {
            Polynomial g = std::move(stack.back());
            stack.pop_back();
            if (g.degree() <= 0) continue;
            if (g.degree() == 1) {
                roots.push_back(f.neg(g.coeffs()[0]));  // g is monic
                continue;
            }
            for (;;) {
                u64 delta = rng() % p;
                Polynomial shifted(p, std::vector<u64>{delta, 1});
                Polynomial w = poly_sub(poly_powmod(shifted, (p - 1) / 2, g, inner), one, inner);
                if (w.is_zero()) continue;
                Polynomial d = poly_gcd(g, w, inner);
                if (d.degree() > 0 && d.degree() < g.degree()) {
                    stack.push_back(poly_divmod(g, d, inner).first);
                    stack.push_back(std::move(d));
                    break;
                }
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    std::vector<FieldElement> out;
    out.reserve(roots.size());
    for (u64 v : roots) out.push_back(FieldElement::raw(v, p));
    return out;
}

std::vector<FieldElement> roots_by_candidates(const Polynomial& poly, std::span<const FieldElement> candidates,
                                              const Arith& arith) {
    std::vector<FieldElement> out;
    for (auto c : candidates)
        if (eval_horner(poly, c, arith).is_zero()) out.push_back(c);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Polynomial random_poly(const Key& seed, std::size_t degree, const PrimeField& field) {
    KeyedHash kh(seed);
    std::vector<u64> c(degree + 1);
    for (std::size_t k = 0; k < degree; ++k) c[k] = prf_field(kh, k, field).value();
    c[degree] = prf_field_nonzero(kh, degree, field).value();
    return Polynomial(field.modulus(), std::move(c));
}

LagrangeBasis::LagrangeBasis(std::span<const FieldElement> xs, const Arith& arith)
    : modulus_(arith.field().modulus()), xs_(xs.begin(), xs.end()) {
    if (xs_.empty()) throw ParameterError("interpolation needs at least one point");
    for (auto x : xs_) arith.check(x);
    {
        std::vector<u64> sorted;
        for (auto x : xs_) sorted.push_back(x.value());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ParameterError("interpolation points repeat an x value");
    }
    const PrimeField& f = arith.field();
    const std::size_t n = xs_.size();
    Polynomial master = poly_from_roots(xs_, arith);
    auto mc = master.coeffs();  // degree n, monic
    Work w;
    basis_.assign(n * n, 0);
    std::vector<u64> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        const u64 xi = xs_[i].value();
        // q = master / (x - xi) by synthetic division.
        q[n - 1] = mc[n];
        for (std::size_t k = n - 1; k > 0; --k) q[k - 1] = f.add(mc[k], f.mul(xi, q[k]));
        u64 denom = 1;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) denom = f.mul(denom, f.sub(xi, xs_[j].value()));
        u64 scale = f.inv(denom);
        for (std::size_t k = 0; k < n; ++k) basis_[k * n + i] = f.mul(scale, q[k]);
        w.muls += (n - 1) + (n - 1) + n;
        w.adds += (n - 1) + (n - 1);
        ++w.invs;
    }
    w.charge(arith);
}

Polynomial LagrangeBasis::interpolate(std::span<const u64> ys, const Arith& arith) const {
    if (ys.size() != xs_.size()) throw ParameterError("interpolation needs one y value per x");
    if (arith.field().modulus() != modulus_) throw ParameterError("interpolation basis belongs to a different field");
    arith.note_interpolation();
    const PrimeField& f = arith.field();
    const std::size_t n = xs_.size();
    std::vector<u64> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        LazyDot dot(f);
        const u64* row = &basis_[k * n];
        for (std::size_t i = 0; i < n; ++i) dot.add(ys[i], row[i]);
        out[k] = dot.value();
    }
    arith.nested().charge(n * (n - 1), n * n);
    return Polynomial(modulus_, std::move(out));
}

Polynomial LagrangeBasis::interpolate(std::span<const FieldElement> ys, const Arith& arith) const {
    std::vector<u64> raw;
    raw.reserve(ys.size());
    for (auto y : ys) {
        arith.check(y);
        raw.push_back(y.value());
    }
    return interpolate(raw, arith);
}

Polynomial interpolate(const PointValuePoly& points, const Arith& arith) {
    if (points.xs.size() != points.ys.size()) throw ParameterError("point-value pairs have mismatched lengths");
    LagrangeBasis basis(points.xs, arith.nested());
    return basis.interpolate(points.ys, arith);
}

}  // namespace dpsi

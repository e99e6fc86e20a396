#include "dpsi/kernels.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpsi {

std::string_view to_string(ExecPolicy p) { return p == ExecPolicy::serial ? "serial" : "parallel"; }

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace kernels {

namespace {

// Runs body(row, tally) once per row with a row-local tally and returns the
// row tallies summed in row order.
template <class Body>
Tally for_each_row(ExecPolicy policy, std::size_t rows, Body&& body) {
    std::vector<Tally> tallies(rows);
    if (policy == ExecPolicy::serial) {
        for (std::size_t r = 0; r < rows; ++r) body(r, tallies[r]);
    } else {
        std::exception_ptr failure;
        const auto count = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t r = 0; r < count; ++r) {
            try {
                body(static_cast<std::size_t>(r), tallies[static_cast<std::size_t>(r)]);
            } catch (...) {
#pragma omp critical(dpsi_kernel_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    Tally total;
    for (const auto& t : tallies) total += t;
    return total;
}

void require_rows(std::size_t polys, const FieldMatrix& m, std::size_t n) {
    if (m.rows() != polys || m.cols() != n) throw ParameterError("matrix shape does not match the bin polynomials");
}

}  // namespace

FieldMatrix expand_blinding(ExecPolicy policy, const Key& mk, std::size_t h, std::size_t n, bool nonzero,
                            const PrimeField& field) {
    if (h == 0 || n == 0) throw ParameterError("blinding matrix needs h, n >= 1");
    FieldMatrix z(h, n, field.modulus());
    KeyedHash master(mk);
    for_each_row(policy, h, [&](std::size_t r, Tally&) {
        KeyedHash bin(derive_key(master, r + 1));
        for (std::size_t i = 0; i < n; ++i)
            z.raw(r, i) = (nonzero ? prf_field_nonzero(bin, i + 1, field) : prf_field(bin, i + 1, field)).value();
    });
    return z;
}

std::vector<Polynomial> random_polys(ExecPolicy policy, const Key& key, std::size_t h, std::size_t degree,
                                     const PrimeField& field) {
    std::vector<Polynomial> out(h);
    KeyedHash master(key);
    for_each_row(policy, h, [&](std::size_t r, Tally&) { out[r] = random_poly(derive_key(master, r + 1), degree, field); });
    return out;
}

FieldMatrix blind_additive(ExecPolicy policy, std::span<const Polynomial> tau, std::span<const FieldElement> xs,
                           const FieldMatrix& z, const PrimeField& field, Tally& tally) {
    require_rows(tau.size(), z, xs.size());
    FieldMatrix o(tau.size(), xs.size(), field.modulus());
    tally += for_each_row(policy, tau.size(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < xs.size(); ++i) o.set(r, i, a.add(eval_horner(tau[r], xs[i], a), z.at(r, i)));
    });
    return o;
}

FieldMatrix blind_multiplicative(ExecPolicy policy, std::span<const Polynomial> tau, std::span<const FieldElement> xs,
                                 const FieldMatrix& z, const PrimeField& field, Tally& tally) {
    require_rows(tau.size(), z, xs.size());
    FieldMatrix o(tau.size(), xs.size(), field.modulus());
    tally += for_each_row(policy, tau.size(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < xs.size(); ++i) o.set(r, i, a.mul(eval_horner(tau[r], xs[i], a), a.inv(z.at(r, i))));
    });
    return o;
}

FieldMatrix mask_single(ExecPolicy policy, std::span<const Polynomial> omega, std::span<const FieldElement> xs,
                        const FieldMatrix& blind, const PrimeField& field, Tally& tally) {
    require_rows(omega.size(), blind, xs.size());
    FieldMatrix out(omega.size(), xs.size(), field.modulus());
    tally += for_each_row(policy, omega.size(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < xs.size(); ++i) out.set(r, i, a.mul(eval_horner(omega[r], xs[i], a), blind.at(r, i)));
    });
    return out;
}

FieldMatrix hadamard(ExecPolicy policy, const FieldMatrix& x, const FieldMatrix& y, const PrimeField& field, Tally& tally) {
    if (!x.same_shape(y)) throw ParameterError("matrix shapes differ");
    FieldMatrix out(x.rows(), x.cols(), field.modulus());
    tally += for_each_row(policy, x.rows(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < x.cols(); ++i) out.set(r, i, a.mul(x.at(r, i), y.at(r, i)));
    });
    return out;
}

FieldMatrix combine_scaled(ExecPolicy policy, const FieldMatrix& first, const FieldMatrix& second, const FieldMatrix& z,
                           const PrimeField& field, Tally& tally) {
    if (!first.same_shape(second) || !first.same_shape(z)) throw ParameterError("matrix shapes differ");
    FieldMatrix out(first.rows(), first.cols(), field.modulus());
    tally += for_each_row(policy, first.rows(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < first.cols(); ++i)
            out.set(r, i, a.add(first.at(r, i), a.mul(second.at(r, i), z.at(r, i))));
    });
    return out;
}

FieldMatrix mask_pair(ExecPolicy policy, const FieldMatrix& blind_a, std::span<const Polynomial> omega_a,
                      const FieldMatrix& blind_b, std::span<const Polynomial> omega_b, const FieldMatrix& pad,
                      std::span<const FieldElement> xs, const PrimeField& field, Tally& tally) {
    require_rows(omega_a.size(), blind_a, xs.size());
    require_rows(omega_b.size(), blind_b, xs.size());
    require_rows(omega_a.size(), pad, xs.size());
    FieldMatrix out(omega_a.size(), xs.size(), field.modulus());
    tally += for_each_row(policy, omega_a.size(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto left = a.mul(blind_a.at(r, i), eval_horner(omega_a[r], xs[i], a));
            auto right = a.mul(blind_b.at(r, i), eval_horner(omega_b[r], xs[i], a));
            out.set(r, i, a.add(a.add(left, right), pad.at(r, i)));
        }
    });
    return out;
}

FieldMatrix subtract(ExecPolicy policy, const FieldMatrix& x, const FieldMatrix& y, const PrimeField& field, Tally& tally) {
    if (!x.same_shape(y)) throw ParameterError("matrix shapes differ");
    FieldMatrix out(x.rows(), x.cols(), field.modulus());
    tally += for_each_row(policy, x.rows(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t);
        for (std::size_t i = 0; i < x.cols(); ++i) out.set(r, i, a.sub(x.at(r, i), y.at(r, i)));
    });
    return out;
}

std::vector<BinRecovery> recover_bins(ExecPolicy policy, const FieldMatrix& values, const LagrangeBasis& basis,
                                      const EncodingParams& enc, const PrimeField& field, Tally& table, Tally& nested,
                                      u64 split_seed) {
    if (values.cols() != basis.size()) throw ParameterError("value rows do not match the interpolation points");
    std::vector<BinRecovery> out(values.rows());
    std::vector<Tally> nested_rows(values.rows());
    table += for_each_row(policy, values.rows(), [&](std::size_t r, Tally& t) {
        Arith a(field, &t, &nested_rows[r]);
        auto& bin = out[r];
        bin.g = basis.interpolate(values.row(r), a);
        if (bin.g.is_zero()) {
            // Only reachable when the masks cancel exactly; nothing to factor.
            a.note_factorization();
            return;
        }
        bin.roots = find_roots(bin.g, a, split_seed + r);
        for (auto root : bin.roots)
            if (auto s = decode_valid_root(root, enc)) bin.valid.push_back(*s);
    });
    for (const auto& t : nested_rows) nested += t;
    return out;
}

}  // namespace kernels
}  // namespace dpsi

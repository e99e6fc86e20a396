#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpsi/bins.hpp"
#include "dpsi/field.hpp"
#include "dpsi/matrix.hpp"
#include "dpsi/poly.hpp"
#include "dpsi/prf.hpp"

namespace dpsi {

/// How the per-bin kernels iterate over bins. `serial` is the reference loop;
/// `parallel` splits bins across OpenMP threads. Both produce identical
/// matrices and identical tallies.
enum class ExecPolicy { serial, parallel };

std::string_view to_string(ExecPolicy p);
int max_threads();

namespace kernels {

/// Rows of z[j][i] = PRF(derive_key(mk, j), i). Untallied.
FieldMatrix expand_blinding(ExecPolicy policy, const Key& mk, std::size_t h, std::size_t n, bool nonzero,
                            const PrimeField& field);

/// omega_j = random_poly(derive_key(key, j), degree) for j = 1..h. Untallied.
std::vector<Polynomial> random_polys(ExecPolicy policy, const Key& key, std::size_t h, std::size_t degree,
                                     const PrimeField& field);

/// o[j][i] = tau_j(x_i) + z[j][i]
FieldMatrix blind_additive(ExecPolicy policy, std::span<const Polynomial> tau, std::span<const FieldElement> xs,
                           const FieldMatrix& z, const PrimeField& field, Tally& tally);

/// o[j][i] = tau_j(x_i) * z[j][i]^-1
FieldMatrix blind_multiplicative(ExecPolicy policy, std::span<const Polynomial> tau, std::span<const FieldElement> xs,
                                 const FieldMatrix& z, const PrimeField& field, Tally& tally);

/// out[j][i] = omega_j(x_i) * blind[j][i]
FieldMatrix mask_single(ExecPolicy policy, std::span<const Polynomial> omega, std::span<const FieldElement> xs,
                        const FieldMatrix& blind, const PrimeField& field, Tally& tally);

/// out[j][i] = a[j][i] * b[j][i]
FieldMatrix hadamard(ExecPolicy policy, const FieldMatrix& a, const FieldMatrix& b, const PrimeField& field, Tally& tally);

/// out[j][i] = first[j][i] + second[j][i] * z[j][i]
FieldMatrix combine_scaled(ExecPolicy policy, const FieldMatrix& first, const FieldMatrix& second, const FieldMatrix& z,
                           const PrimeField& field, Tally& tally);

/// out[j][i] = blind_a[j][i] * omega_a_j(x_i) + blind_b[j][i] * omega_b_j(x_i) + pad[j][i]
FieldMatrix mask_pair(ExecPolicy policy, const FieldMatrix& blind_a, std::span<const Polynomial> omega_a,
                      const FieldMatrix& blind_b, std::span<const Polynomial> omega_b, const FieldMatrix& pad,
                      std::span<const FieldElement> xs, const PrimeField& field, Tally& tally);

/// out[j][i] = a[j][i] - b[j][i]
FieldMatrix subtract(ExecPolicy policy, const FieldMatrix& a, const FieldMatrix& b, const PrimeField& field, Tally& tally);

struct BinRecovery {
    Polynomial g;
    std::vector<FieldElement> roots;
    std::vector<u64> valid;  // decoded valid roots, ascending
};

/// Per bin: interpolate row j through the basis points, find its roots in F_p,
/// and keep the valid encodings. One interpolation and one factorization per
/// bin land on `table`; their inner field operations on `nested`.
std::vector<BinRecovery> recover_bins(ExecPolicy policy, const FieldMatrix& values, const LagrangeBasis& basis,
                                      const EncodingParams& enc, const PrimeField& field, Tally& table, Tally& nested,
                                      u64 split_seed);

}  // namespace kernels
}  // namespace dpsi

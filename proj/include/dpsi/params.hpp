#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpsi/bins.hpp"
#include "dpsi/field.hpp"
#include "dpsi/prf.hpp"

namespace dpsi {

enum class Scheme { eo, improved };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

inline constexpr double kDefaultFailProb = 0x1p-30;
inline constexpr const char* kHashSpec = "sha256-be64-mod-h";
inline constexpr const char* kPrfSpec = "hmac-sha256-trunc128";

/// Cloud-side setup inputs.
struct SetupConfig {
    u64 prime = PrimeField::kMersenne61;
    std::size_t c = 50;
    std::size_t d = 10;
    double fail_prob = kDefaultFailProb;
    /// Explicit bin count; when unset h comes from suggest_bin_count.
    std::optional<std::size_t> bins;
    EncodingParams enc;
    Key xs_seed = Key::from_seed(0);
};

/// Everything the cloud publishes before outsourcing.
struct PublicParams {
    PrimeField field = PrimeField::mersenne61();
    std::size_t c = 0;
    HashTableParams table;
    EncodingParams enc;
    std::vector<FieldElement> xs;
    std::string hash_spec = kHashSpec;
    std::string prf_spec = kPrfSpec;

    std::size_t h() const { return table.h; }
    std::size_t d() const { return table.d; }
    std::size_t n() const { return table.n; }

    bool operator==(const PublicParams&) const = default;
};

/// Throws ConfigError for a non-prime modulus, c < 1, or inconsistent table/encoding parameters.
PublicParams cloud_setup(const SetupConfig& config);

}  // namespace dpsi

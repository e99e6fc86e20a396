#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dpsi/counters.hpp"
#include "dpsi/kernels.hpp"
#include "dpsi/params.hpp"
#include "dpsi/prf.hpp"

namespace dpsi {

struct PartyCounts {
    u64 adds = 0;
    u64 muls = 0;
    u64 interp_factor = 0;

    bool operator==(const PartyCounts&) const = default;
};

/// Online-phase counts from the closed forms, n = 2d + 1.
struct ExpectedCounts {
    Scheme scheme = Scheme::improved;
    std::size_t h = 0;
    std::size_t d = 0;
    std::size_t n = 0;
    PartyCounts a;
    PartyCounts cloud;
    PartyCounts b;

    const PartyCounts& of(Party p) const;
    u64 total_muls() const { return a.muls + cloud.muls + b.muls; }
    u64 max_client_muls() const { return std::max(a.muls, b.muls); }
};

/// Throws ParameterError when h or d is zero.
ExpectedCounts expected_counts(Scheme scheme, std::size_t h, std::size_t d);

struct CountMismatch {
    Party party;
    std::string op;
    u64 measured;
    u64 expected;

    bool operator==(const CountMismatch&) const = default;
};

struct CountReport {
    std::vector<CountMismatch> mismatches;

    bool exact() const { return mismatches.empty(); }
    std::string str() const;
};

/// Cell-by-cell comparison of the online phase only: adds, muls, inverses
/// (expected zero), interpolations and factorizations.
CountReport compare_counts(const OpCounters& measured, const ExpectedCounts& expected);

struct BenchRow {
    Scheme scheme = Scheme::improved;
    std::size_t c = 0;
    std::size_t h = 0;
    std::size_t d = 0;
    std::size_t n = 0;
    Party party = Party::A;
    Phase phase = Phase::online;
    Tally counts;           // from the first trial; identical across trials
    std::size_t msg_bytes = 0;
    double ms = 0;          // mean over trials
};

struct BenchConfig {
    std::vector<std::size_t> c_values;
    std::size_t d = 10;
    std::optional<std::size_t> bins;  // forced h, otherwise suggest_bin_count
    std::size_t trials = 1;
    Key seed = Key::from_seed(0);
    bool timing = true;  // false writes ms = 0 so the CSV is reproducible
    ExecPolicy policy = ExecPolicy::parallel;
};

struct BenchResult {
    std::vector<BenchRow> rows;  // ordered by scheme, c, party, phase
    CountReport conformance;     // mismatches over every session run
};

/// Sessions with random sets of exactly c elements per client.
/// Throws ConfigError on an empty c list, c = 0 or trials = 0.
BenchResult bench_sweep(std::span<const Scheme> schemes, const BenchConfig& config);

inline constexpr const char* kBenchCsvHeader = "scheme,c,h,d,n,party,phase,adds,muls,invs,interp_factor,msg_bytes,ms";
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

/// Sum over parties of online muls, and of bytes over all phases, for one (scheme, c).
struct SweepPoint {
    std::size_t c;
    double total_muls;
    double total_bytes;
};
std::vector<SweepPoint> sweep_totals(std::span<const BenchRow> rows, Scheme scheme);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

/// Deterministic random set of `size` distinct u-bit values.
std::vector<u64> random_set(std::size_t size, unsigned u_bits, std::uint64_t seed);

}  // namespace dpsi

#include "dpsi/metrics.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <chrono>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "dpsi/protocol.hpp"

namespace dpsi {

const PartyCounts& ExpectedCounts::of(Party p) const {
    switch (p) {
        case Party::A: return a;
        case Party::B: return b;
        case Party::C: return cloud;
    }
    return a;
}

ExpectedCounts expected_counts(Scheme scheme, std::size_t h, std::size_t d) {
    if (h == 0 || d == 0) throw ParameterError("expected counts need h >= 1 and d >= 1");
    ExpectedCounts e;
    e.scheme = scheme;
    e.h = h;
    e.d = d;
    e.n = 2 * d + 1;
    const u64 H = h, D = d, N = e.n;
    if (scheme == Scheme::improved) {
        e.a = {H * N * D, H * N * (D + 1), 0};
        e.cloud = {H * N * D, H * N * (D + 2), 0};
        e.b = {H * N, H * N, H};
    } else {
        const u64 both = 2 * H * N * (D + 1);
        e.a = {both, both, 0};
        e.cloud = {both, both, 0};
        e.b = {H * N, 0, H};
    }
    return e;
}

std::string CountReport::str() const {
    if (mismatches.empty()) return "counts: EXACT MATCH";
    std::ostringstream s;
    s << "counts: " << mismatches.size() << " MISMATCH(ES)";
    for (const auto& m : mismatches)
        s << "\n  " << to_string(m.party) << " " << m.op << ": measured " << m.measured << ", expected " << m.expected;
    return s.str();
}

CountReport compare_counts(const OpCounters& measured, const ExpectedCounts& expected) {
    CountReport r;
    for (Party p : {Party::A, Party::C, Party::B}) {
        const Tally& t = measured.table(p, Phase::online);
        const PartyCounts& e = expected.of(p);
        auto check = [&](const char* op, u64 got, u64 want) {
            if (got != want) r.mismatches.push_back({p, op, got, want});
        };
        check("adds", t.adds, e.adds);
        check("muls", t.muls, e.muls);
        check("invs", t.invs, 0);
        check("interpolations", t.interpolations, e.interp_factor);
        check("factorizations", t.factorizations, e.interp_factor);
    }
    return r;
}

std::vector<u64> random_set(std::size_t size, unsigned u_bits, std::uint64_t seed) {
    const u64 universe = u_bits >= 64 ? ~u64{0} : (u64{1} << u_bits) - 1;
    if (u_bits < 64 && size > universe + 1) throw ConfigError("set larger than the element universe");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<u64> dist(0, universe);
    std::unordered_set<u64> seen;
    std::vector<u64> out;
    out.reserve(size);
    while (out.size() < size) {
        u64 v = dist(rng);
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

BenchResult bench_sweep(std::span<const Scheme> schemes, const BenchConfig& config) {
    if (config.c_values.empty()) throw ConfigError("bench needs at least one cardinality");
    if (config.trials == 0) throw ConfigError("bench needs at least one trial");
    for (auto c : config.c_values)
        if (c == 0) throw ConfigError("cardinality must be at least 1");

    BenchResult result;
    KeyedHash seeds(config.seed);
    for (Scheme scheme : schemes) {
        for (std::size_t ci = 0; ci < config.c_values.size(); ++ci) {
            const std::size_t c = config.c_values[ci];
            SetupConfig setup;
            setup.c = c;
            setup.d = config.d;
            setup.bins = config.bins;
            std::array<double, 9> ms{};
            std::optional<SessionOutcome> first;
            for (std::size_t trial = 0; trial < config.trials; ++trial) {
                const u64 index = (static_cast<u64>(ci) << 32) | trial;
                Key root = derive_key(seeds, index);
                Key set_key = derive_key(root, 100);
                u64 set_seed = 0;
                for (int i = 0; i < 8; ++i) set_seed = set_seed << 8 | set_key.bytes()[i];
                // A and B share about half of their elements.
                auto pool = random_set(c + c / 2, setup.enc.u, set_seed);
                std::vector<u64> set_a(pool.begin(), pool.begin() + c);
                std::vector<u64> set_b(pool.begin() + c / 2, pool.end());
                auto outcome = run_session(scheme, set_a, set_b, root, setup, config.policy);
                auto report = compare_counts(outcome.counters, expected_counts(scheme, outcome.params.h(), config.d));
                result.conformance.mismatches.insert(result.conformance.mismatches.end(), report.mismatches.begin(),
                                                     report.mismatches.end());
                for (std::size_t i = 0; i < 9; ++i) ms[i] += outcome.ms[i];
                if (!first) first = std::move(outcome);
            }
            for (Party p : {Party::A, Party::B, Party::C}) {
                for (Phase ph : {Phase::setup, Phase::outsource, Phase::online}) {
                    BenchRow row;
                    row.scheme = scheme;
                    row.c = c;
                    row.h = first->params.h();
                    row.d = first->params.d();
                    row.n = first->params.n();
                    row.party = p;
                    row.phase = ph;
                    row.counts = first->counters.table(p, ph);
                    row.msg_bytes = first->bytes_sent(p, ph);
                    if (config.timing) {
                        std::size_t pi = p == Party::A ? 0 : p == Party::B ? 1 : 2;
                        row.ms = ms[pi * 3 + static_cast<std::size_t>(ph)] / static_cast<double>(config.trials);
                    }
                    result.rows.push_back(row);
                }
            }
        }
    }
    return result;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
    out << kBenchCsvHeader << '\n';
    for (const auto& r : rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.ms);
        out << to_string(r.scheme) << ',' << r.c << ',' << r.h << ',' << r.d << ',' << r.n << ',' << to_string(r.party)
            << ',' << to_string(r.phase) << ',' << r.counts.adds << ',' << r.counts.muls << ',' << r.counts.invs << ','
            << r.counts.interpolations << ',' << r.msg_bytes << ',' << ms << '\n';
    }
}

std::vector<SweepPoint> sweep_totals(std::span<const BenchRow> rows, Scheme scheme) {
    std::map<std::size_t, SweepPoint> by_c;
    for (const auto& r : rows) {
        if (r.scheme != scheme) continue;
        auto& pt = by_c.try_emplace(r.c, SweepPoint{r.c, 0, 0}).first->second;
        if (r.phase == Phase::online) pt.total_muls += static_cast<double>(r.counts.muls);
        pt.total_bytes += static_cast<double>(r.msg_bytes);
    }
    std::vector<SweepPoint> out;
    for (auto& [c, pt] : by_c) out.push_back(pt);
    return out;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("linear fit needs two or more paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw ParameterError("linear fit needs distinct x values");
    if (syy == 0) return 1.0;
    return sxy * sxy / (sxx * syy);
}

}  // namespace dpsi

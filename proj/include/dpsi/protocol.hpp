#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dpsi/bins.hpp"
#include "dpsi/counters.hpp"
#include "dpsi/kernels.hpp"
#include "dpsi/params.hpp"
#include "dpsi/poly.hpp"
#include "dpsi/prf.hpp"
#include "dpsi/wire.hpp"

namespace dpsi {

/// Every key of one simulated session, derived from a single root key so a
/// session is reproducible from its seed. Index k of the root gives:
/// 1 mk_A, 2 mk_B, 3 tk (EO) / tk1 (improved), 4 tk2, 5 pad_A, 6 pad_B, 7 xs seed, 8 split seed.
struct SessionKeys {
    Key mk_a;
    Key mk_b;
    Key tk;
    Key tk2;
    Key pad_a;
    Key pad_b;
    Key xs_seed;
    u64 split_seed = 0;

    static SessionKeys derive(const Key& root);
};

/// The cloud's record of outsourced datasets, keyed by party id. Holds blinded
/// matrices only; no client key ever reaches it.
class CloudStore {
public:
    void put(Party party, BlindedMatrix o) { data_[party] = std::move(o); }
    bool has(Party party) const { return data_.count(party) != 0; }
    /// Throws ProtocolError naming the party when nothing was outsourced.
    const BlindedMatrix& get(Party party) const;

    static std::filesystem::path file_for(const std::filesystem::path& dir, Party party);
    /// One file per party id, matrix wire encoding.
    void save(const std::filesystem::path& dir, const PrimeField& field) const;
    static CloudStore load(const std::filesystem::path& dir, const PrimeField& field);

private:
    std::map<Party, BlindedMatrix> data_;
};

/// Serializes every message, records the bytes, and hands the receiver the re-parsed copy.
class RecordingTransport {
public:
    explicit RecordingTransport(PrimeField field) : field_(field) {}

    Message deliver(const Message& m);
    const Transcript& transcript() const { return transcript_; }
    Transcript take() { return std::move(transcript_); }

private:
    PrimeField field_;
    Transcript transcript_;
};

struct OutsourceResult {
    Message message;
    BinTable table;
    std::vector<Polynomial> tau;  // owner-side bin polynomials
};

/// Client-side setup and outsourcing: bins, pads, evaluates tau_j at every x_i and
/// blinds additively (eo) or by the inverse of a nonzero z (improved).
/// Tallied under (who, outsource).
OutsourceResult client_outsource(Party who, std::span<const u64> set, const Key& mk, const PublicParams& params,
                                 Scheme scheme, const Key& pad_seed, OpCounters& counters,
                                 ExecPolicy policy = ExecPolicy::parallel);

/// Improved delegation by client A: q[j][i] = omega_j^A(x_i) * z^A[j][i]. No key leaves A.
Message improved_delegate(const Key& mk_a, const Key& tk1, const PublicParams& params, OpCounters& counters,
                          ExecPolicy policy = ExecPolicy::parallel);

/// Cloud result: q' = q * o^A and q'' = omega_j^C(x_i) * o^B.
Message improved_cloud_compute(const DelegationToCloud& request, const Key& tk2, const CloudStore& store,
                               const PublicParams& params, OpCounters& counters, ExecPolicy policy = ExecPolicy::parallel);

struct RetrievalResult {
    std::vector<u64> intersection;   // interpolation + root finding
    std::vector<u64> by_candidates;  // evaluation at B's own encoded elements
    std::vector<Polynomial> g;       // per-bin interpolated polynomial
};

/// Client B: g = q' + q'' * z^B, then per bin interpolate, find roots, decode.
RetrievalResult improved_retrieve(const CloudResultImproved& result, const Key& mk_b, std::span<const u64> own_set,
                                  const PublicParams& params, OpCounters& counters, u64 split_seed = 0x5eed,
                                  ExecPolicy policy = ExecPolicy::parallel);

/// Masks that EO-PSI derives from tk: a from k_1, omega^A from k_2, omega^B from k_3.
struct EoMasks {
    FieldMatrix a;
    std::vector<Polynomial> omega_a;
    std::vector<Polynomial> omega_b;
};
EoMasks eo_masks(const Key& tk, const PublicParams& params, ExecPolicy policy = ExecPolicy::parallel);

/// EO-PSI delegation by client A: returns (q to B, tk to the cloud).
std::pair<Message, Message> eopsi_delegate(const Key& mk_a, const Key& mk_b, const Key& tk, const PublicParams& params,
                                           OpCounters& counters, ExecPolicy policy = ExecPolicy::parallel);

/// EO-PSI cloud result t = o^A omega^A + o^B omega^B + a.
Message eopsi_cloud_compute(const DelegationKeyToCloud& request, const CloudStore& store, const PublicParams& params,
                            OpCounters& counters, ExecPolicy policy = ExecPolicy::parallel);

/// Client B: g = t - q, then per bin interpolate, find roots, decode.
RetrievalResult eopsi_retrieve(const CloudResultEO& t, const QToB& q, std::span<const u64> own_set,
                               const PublicParams& params, OpCounters& counters, u64 split_seed = 0x5eed,
                               ExecPolicy policy = ExecPolicy::parallel);

/// Harness-side view of party internals, for invariant checks only.
struct SessionDiagnostics {
    std::vector<Polynomial> tau_a;
    std::vector<Polynomial> tau_b;
    std::vector<Polynomial> g;
    std::vector<u64> by_candidates;
};

struct SessionOutcome {
    Scheme scheme = Scheme::improved;
    PublicParams params;
    SessionKeys keys;
    std::vector<u64> intersection;
    Transcript transcript;
    OpCounters counters;
    SessionDiagnostics diag;
    std::array<double, 9> ms{};  // wall clock per (party, phase)

    double elapsed_ms(Party p, Phase ph) const;
    /// Serialized bytes sent by `p` in `ph`.
    std::size_t bytes_sent(Party p, Phase ph) const;
};

/// setup -> outsource(A) -> outsource(B) -> start -> delegate -> cloud -> retrieve.
/// Deterministic in (root, config). The evaluation-point seed in `config` is
/// replaced by the root-derived one. Step failures surface as ProtocolError
/// prefixed with the step name; setup failures stay ConfigError.
SessionOutcome run_session(Scheme scheme, std::span<const u64> set_a, std::span<const u64> set_b, const Key& root,
                           const SetupConfig& config, ExecPolicy policy = ExecPolicy::parallel);

/// Phase a message belongs to in the complexity tables.
Phase message_phase(const Message& m);

}  // namespace dpsi

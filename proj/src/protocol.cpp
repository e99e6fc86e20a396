#include "dpsi/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <set>

namespace dpsi {

std::string_view to_string(Scheme s) { return s == Scheme::eo ? "eo" : "improved"; }

Scheme parse_scheme(std::string_view text) {
    if (text == "eo") return Scheme::eo;
    if (text == "improved") return Scheme::improved;
    throw ConfigError("unknown scheme '" + std::string(text) + "' (expected eo or improved)");
}

PublicParams cloud_setup(const SetupConfig& config) {
    PublicParams p;
    try {
        p.field = PrimeField(config.prime);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (config.c < 1) throw ConfigError("set cardinality bound c must be at least 1");
    if (config.d < 1) throw ConfigError("bin capacity d must be at least 1");
    p.c = config.c;
    std::size_t h = config.bins ? *config.bins : suggest_bin_count(config.c, config.d, config.fail_prob);
    p.table = HashTableParams::make(h, config.d);
    p.enc = config.enc;
    p.enc.validate(p.field);
    p.xs = sample_eval_points(p.table.n, config.xs_seed, p.enc, p.field);
    return p;
}

SessionKeys SessionKeys::derive(const Key& root) {
    KeyedHash kh(root);
    SessionKeys k;
    k.mk_a = derive_key(kh, 1).with_role(KeyRole::master_a);
    k.mk_b = derive_key(kh, 2).with_role(KeyRole::master_b);
    k.tk = derive_key(kh, 3).with_role(KeyRole::tk);
    k.tk2 = derive_key(kh, 4).with_role(KeyRole::tk2);
    k.pad_a = derive_key(kh, 5);
    k.pad_b = derive_key(kh, 6);
    k.xs_seed = derive_key(kh, 7);
    auto split = derive_key(kh, 8).bytes();
    for (int i = 0; i < 8; ++i) k.split_seed = k.split_seed << 8 | split[i];
    return k;
}

const BlindedMatrix& CloudStore::get(Party party) const {
    auto it = data_.find(party);
    if (it == data_.end())
        throw ProtocolError("cloud store has no outsourced dataset for party " + std::string(to_string(party)));
    return it->second;
}

std::filesystem::path CloudStore::file_for(const std::filesystem::path& dir, Party party) {
    return dir / ("party_" + std::string(to_string(party)) + ".bin");
}

void CloudStore::save(const std::filesystem::path& dir, const PrimeField& field) const {
    std::filesystem::create_directories(dir);
    for (const auto& [party, m] : data_) write_file(file_for(dir, party), encode_matrix(m, field));
}

CloudStore CloudStore::load(const std::filesystem::path& dir, const PrimeField& field) {
    CloudStore s;
    for (Party p : {Party::A, Party::B}) {
        auto path = file_for(dir, p);
        if (std::filesystem::exists(path)) s.put(p, decode_matrix(read_file(path), field));
    }
    return s;
}

Message RecordingTransport::deliver(const Message& m) {
    const auto& entry = transcript_.append(m, field_);
    if (!(entry.message == m)) throw FormatError("message did not survive a serialization round trip");
    return entry.message;
}

namespace {

void require_shape(const FieldMatrix& m, const PublicParams& params, std::string_view what) {
    if (m.rows() != params.h() || m.cols() != params.n() || m.modulus() != params.field.modulus())
        throw ProtocolError(std::string(what) + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            ", expected " + std::to_string(params.h()) + "x" + std::to_string(params.n()));
}

void require_cardinality(std::span<const u64> set, const PublicParams& params) {
    if (set.size() > params.c)
        throw ProtocolError("set cardinality " + std::to_string(set.size()) + " exceeds the bound c=" + std::to_string(params.c));
}

std::vector<u64> union_valid(const std::vector<kernels::BinRecovery>& bins) {
    std::set<u64> all;
    for (const auto& b : bins) all.insert(b.valid.begin(), b.valid.end());
    return {all.begin(), all.end()};
}

// Oracle path: evaluate each bin polynomial at B's own elements of that bin.
std::vector<u64> candidate_path(const std::vector<kernels::BinRecovery>& bins, std::span<const u64> own_set,
                                const PublicParams& params) {
    std::vector<std::vector<FieldElement>> by_bin(params.h());
    for (u64 s : own_set) {
        auto e = encode_element(s, params.enc, params.field);
        by_bin[assign_bin(e, params.table) - 1].push_back(e);
    }
    Arith quiet(params.field);
    std::set<u64> out;
    for (std::size_t j = 0; j < bins.size(); ++j) {
        if (bins[j].g.is_zero()) continue;
        for (auto root : roots_by_candidates(bins[j].g, by_bin[j], quiet))
            if (auto s = decode_valid_root(root, params.enc)) out.insert(*s);
    }
    return {out.begin(), out.end()};
}

RetrievalResult finish_retrieval(const FieldMatrix& g, std::span<const u64> own_set, const PublicParams& params,
                                 OpCounters& counters, u64 split_seed, ExecPolicy policy) {
    LagrangeBasis basis(params.xs, Arith(params.field, &counters.nested(Party::B, Phase::online)));
    auto bins = kernels::recover_bins(policy, g, basis, params.enc, params.field, counters.table(Party::B, Phase::online),
                                      counters.nested(Party::B, Phase::online), split_seed);
    RetrievalResult r;
    r.intersection = union_valid(bins);
    r.by_candidates = candidate_path(bins, own_set, params);
    r.g.reserve(bins.size());
    for (auto& b : bins) r.g.push_back(std::move(b.g));
    return r;
}

}  // namespace

OutsourceResult client_outsource(Party who, std::span<const u64> set, const Key& mk, const PublicParams& params,
                                 Scheme scheme, const Key& pad_seed, OpCounters& counters, ExecPolicy policy) {
    require_cardinality(set, params);
    Tally& tally = counters.table(who, Phase::outsource);
    OutsourceResult out;
    out.table = build_table(set, params.table, params.enc, pad_seed, params.xs, params.field);
    Arith arith(params.field, &tally);
    out.tau.reserve(params.h());
    for (const auto& bin : out.table.bins) out.tau.push_back(poly_from_roots(bin, arith));

    const bool improved = scheme == Scheme::improved;
    auto z = kernels::expand_blinding(policy, mk, params.h(), params.n(), improved, params.field);
    BlindedMatrix o;
    if (improved) {
        o = {MatrixKind::o_multiplicative, kernels::blind_multiplicative(policy, out.tau, params.xs, z, params.field, tally)};
    } else {
        o = {MatrixKind::o_additive, kernels::blind_additive(policy, out.tau, params.xs, z, params.field, tally)};
    }
    out.message = Message{who, Party::C, Outsource{who, std::move(o)}};
    return out;
}

Message improved_delegate(const Key& mk_a, const Key& tk1, const PublicParams& params, OpCounters& counters,
                          ExecPolicy policy) {
    auto z_a = kernels::expand_blinding(policy, mk_a, params.h(), params.n(), true, params.field);
    auto omega_a = kernels::random_polys(policy, tk1, params.h(), params.d(), params.field);
    auto q = kernels::mask_single(policy, omega_a, params.xs, z_a, params.field, counters.table(Party::A, Phase::online));
    return Message{Party::A, Party::C, DelegationToCloud{Party::A, Party::B, {MatrixKind::q, std::move(q)}}};
}

Message improved_cloud_compute(const DelegationToCloud& request, const Key& tk2, const CloudStore& store,
                               const PublicParams& params, OpCounters& counters, ExecPolicy policy) {
    const auto& o_a = store.get(request.a_id);
    const auto& o_b = store.get(request.b_id);
    require_shape(request.q.m, params, "delegation matrix q");
    require_shape(o_a.m, params, "outsourced matrix of A");
    require_shape(o_b.m, params, "outsourced matrix of B");
    Tally& tally = counters.table(Party::C, Phase::online);
    auto q_prime = kernels::hadamard(policy, request.q.m, o_a.m, params.field, tally);
    auto omega_c = kernels::random_polys(policy, tk2, params.h(), params.d(), params.field);
    auto q_dprime = kernels::mask_single(policy, omega_c, params.xs, o_b.m, params.field, tally);
    return Message{Party::C, request.b_id,
                   CloudResultImproved{{MatrixKind::q_prime, std::move(q_prime)}, {MatrixKind::q_dprime, std::move(q_dprime)}}};
}

RetrievalResult improved_retrieve(const CloudResultImproved& result, const Key& mk_b, std::span<const u64> own_set,
                                  const PublicParams& params, OpCounters& counters, u64 split_seed, ExecPolicy policy) {
    require_shape(result.q_prime.m, params, "q'");
    require_shape(result.q_dprime.m, params, "q''");
    auto z_b = kernels::expand_blinding(policy, mk_b, params.h(), params.n(), true, params.field);
    auto g = kernels::combine_scaled(policy, result.q_prime.m, result.q_dprime.m, z_b, params.field,
                                     counters.table(Party::B, Phase::online));
    return finish_retrieval(g, own_set, params, counters, split_seed, policy);
}

EoMasks eo_masks(const Key& tk, const PublicParams& params, ExecPolicy policy) {
    KeyedHash kh(tk);
    Key k1 = derive_key(kh, 1);
    Key k2 = derive_key(kh, 2);
    Key k3 = derive_key(kh, 3);
    EoMasks m;
    m.a = kernels::expand_blinding(policy, k1, params.h(), params.n(), false, params.field);
    m.omega_a = kernels::random_polys(policy, k2, params.h(), params.d(), params.field);
    m.omega_b = kernels::random_polys(policy, k3, params.h(), params.d(), params.field);
    return m;
}

std::pair<Message, Message> eopsi_delegate(const Key& mk_a, const Key& mk_b, const Key& tk, const PublicParams& params,
                                           OpCounters& counters, ExecPolicy policy) {
    auto masks = eo_masks(tk, params, policy);
    auto z_a = kernels::expand_blinding(policy, mk_a, params.h(), params.n(), false, params.field);
    auto z_b = kernels::expand_blinding(policy, mk_b, params.h(), params.n(), false, params.field);
    auto q = kernels::mask_pair(policy, z_a, masks.omega_a, z_b, masks.omega_b, masks.a, params.xs, params.field,
                                counters.table(Party::A, Phase::online));
    Message to_b{Party::A, Party::B, QToB{{MatrixKind::q, std::move(q)}}};
    Message to_cloud{Party::A, Party::C, DelegationKeyToCloud{Party::A, Party::B, tk.with_role(KeyRole::tk)}};
    return {std::move(to_b), std::move(to_cloud)};
}

Message eopsi_cloud_compute(const DelegationKeyToCloud& request, const CloudStore& store, const PublicParams& params,
                            OpCounters& counters, ExecPolicy policy) {
    const auto& o_a = store.get(request.a_id);
    const auto& o_b = store.get(request.b_id);
    require_shape(o_a.m, params, "outsourced matrix of A");
    require_shape(o_b.m, params, "outsourced matrix of B");
    auto masks = eo_masks(request.tk, params, policy);
    auto t = kernels::mask_pair(policy, o_a.m, masks.omega_a, o_b.m, masks.omega_b, masks.a, params.xs, params.field,
                                counters.table(Party::C, Phase::online));
    return Message{Party::C, request.b_id, CloudResultEO{{MatrixKind::t, std::move(t)}}};
}

RetrievalResult eopsi_retrieve(const CloudResultEO& t, const QToB& q, std::span<const u64> own_set,
                               const PublicParams& params, OpCounters& counters, u64 split_seed, ExecPolicy policy) {
    require_shape(t.t.m, params, "t");
    require_shape(q.q.m, params, "q");
    auto g = kernels::subtract(policy, t.t.m, q.q.m, params.field, counters.table(Party::B, Phase::online));
    return finish_retrieval(g, own_set, params, counters, split_seed, policy);
}

Phase message_phase(const Message& m) {
    return std::holds_alternative<Outsource>(m.payload) ? Phase::outsource : Phase::online;
}

double SessionOutcome::elapsed_ms(Party p, Phase ph) const {
    std::size_t i = p == Party::A ? 0 : p == Party::B ? 1 : 2;
    return ms[i * 3 + static_cast<std::size_t>(ph)];
}

std::size_t SessionOutcome::bytes_sent(Party p, Phase ph) const {
    std::size_t n = 0;
    for (const auto& e : transcript.entries())
        if (e.message.from == p && message_phase(e.message) == ph) n += e.bytes.size();
    return n;
}

namespace {

class StepTimer {
public:
    StepTimer(SessionOutcome& out, Party p, Phase ph) : out_(out), p_(p), ph_(ph), start_(std::chrono::steady_clock::now()) {}
    ~StepTimer() {
        std::size_t i = p_ == Party::A ? 0 : p_ == Party::B ? 1 : 2;
        out_.ms[i * 3 + static_cast<std::size_t>(ph_)] +=
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    SessionOutcome& out_;
    Party p_;
    Phase ph_;
    std::chrono::steady_clock::time_point start_;
};

template <class F>
auto step(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw ProtocolError(std::string("step ") + name + ": " + e.what());
    }
}

}  // namespace

SessionOutcome run_session(Scheme scheme, std::span<const u64> set_a, std::span<const u64> set_b, const Key& root,
                           const SetupConfig& config, ExecPolicy policy) {
    SessionOutcome out;
    out.scheme = scheme;
    out.keys = SessionKeys::derive(root);
    const SessionKeys& k = out.keys;
    {
        StepTimer timer(out, Party::C, Phase::setup);
        SetupConfig cfg = config;
        cfg.xs_seed = k.xs_seed;
        out.params = cloud_setup(cfg);
    }
    const PublicParams& params = out.params;
    RecordingTransport wire(params.field);
    CloudStore store;

    auto outsource = [&](Party who, std::span<const u64> set, const Key& mk, const Key& pad, const char* name) {
        auto result = step(name, [&] {
            StepTimer timer(out, who, Phase::outsource);
            return client_outsource(who, set, mk, params, scheme, pad, out.counters, policy);
        });
        auto delivered = wire.deliver(result.message);
        store.put(who, std::get<Outsource>(delivered.payload).o);
        return std::move(result.tau);
    };
    out.diag.tau_a = outsource(Party::A, set_a, k.mk_a, k.pad_a, "outsource(A)");
    out.diag.tau_b = outsource(Party::B, set_b, k.mk_b, k.pad_b, "outsource(B)");

    RetrievalResult result;
    if (scheme == Scheme::improved) {
        wire.deliver(Message{Party::B, Party::A, StartRequest{Party::B}});
        auto delegation = step("delegate", [&] {
            StepTimer timer(out, Party::A, Phase::online);
            return improved_delegate(k.mk_a, k.tk.with_role(KeyRole::tk1), params, out.counters, policy);
        });
        auto at_cloud = wire.deliver(delegation);
        auto reply = step("cloud", [&] {
            StepTimer timer(out, Party::C, Phase::online);
            return improved_cloud_compute(std::get<DelegationToCloud>(at_cloud.payload), k.tk2, store, params,
                                          out.counters, policy);
        });
        auto at_b = wire.deliver(reply);
        result = step("retrieve", [&] {
            StepTimer timer(out, Party::B, Phase::online);
            return improved_retrieve(std::get<CloudResultImproved>(at_b.payload), k.mk_b, set_b, params, out.counters,
                                     k.split_seed, policy);
        });
    } else {
        auto start = wire.deliver(Message{Party::B, Party::A, StartRequestWithKey{Party::B, k.mk_b}});
        const Key& received_mk_b = std::get<StartRequestWithKey>(start.payload).mk_b;
        auto [to_b, to_cloud] = step("delegate", [&] {
            StepTimer timer(out, Party::A, Phase::online);
            return eopsi_delegate(k.mk_a, received_mk_b, k.tk, params, out.counters, policy);
        });
        auto q_at_b = wire.deliver(to_b);
        auto tk_at_cloud = wire.deliver(to_cloud);
        auto reply = step("cloud", [&] {
            StepTimer timer(out, Party::C, Phase::online);
            return eopsi_cloud_compute(std::get<DelegationKeyToCloud>(tk_at_cloud.payload), store, params, out.counters,
                                       policy);
        });
        auto t_at_b = wire.deliver(reply);
        result = step("retrieve", [&] {
            StepTimer timer(out, Party::B, Phase::online);
            return eopsi_retrieve(std::get<CloudResultEO>(t_at_b.payload), std::get<QToB>(q_at_b.payload), set_b, params,
                                  out.counters, k.split_seed, policy);
        });
    }
    out.intersection = std::move(result.intersection);
    out.diag.by_candidates = std::move(result.by_candidates);
    out.diag.g = std::move(result.g);
    out.transcript = wire.take();
    return out;
}

}  // namespace dpsi

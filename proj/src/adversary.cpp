#include "dpsi/adversary.hpp"

#include <algorithm>
#include <set>

#include "dpsi/kernels.hpp"
#include "dpsi/protocol.hpp"

namespace dpsi {

namespace {

constexpr Party kParties[] = {Party::A, Party::B, Party::C};
constexpr std::pair<Party, Party> kChannels[] = {{Party::A, Party::B}, {Party::B, Party::A}, {Party::A, Party::C},
                                                 {Party::C, Party::A}, {Party::B, Party::C}, {Party::C, Party::B}};

Party parse_party(char c) {
    for (Party p : kParties)
        if (static_cast<char>(p) == c) return p;
    throw ConfigError(std::string("unknown party '") + c + "' in channel list");
}

template <class T>
const T* find_payload(const EavesdropperView& view, Party from, Party to) {
    for (const auto& e : view.messages)
        if (e.message.from == from && e.message.to == to)
            if (auto* p = std::get_if<T>(&e.message.payload)) return p;
    return nullptr;
}

const Outsource* find_outsource(const EavesdropperView& view, Party who) {
    for (const auto& e : view.messages)
        if (e.message.from == who && e.message.to == Party::C)
            if (auto* p = std::get_if<Outsource>(&e.message.payload); p && p->party == who) return p;
    return nullptr;
}

bool has_shape(const FieldMatrix& m, const PublicParams& params) {
    return m.rows() == params.h() && m.cols() == params.n() && m.modulus() == params.field.modulus();
}

AttackReport not_applicable(std::string_view attack, std::string detail) {
    AttackReport r;
    r.attack = std::string(attack);
    r.detail = std::move(detail);
    return r;
}

// Interpolate every row through xs, factor, keep valid encodings.
std::vector<u64> decode_rows(const FieldMatrix& values, const PublicParams& params) {
    Tally table, nested;
    LagrangeBasis basis(params.xs, Arith(params.field, &nested));
    auto bins = kernels::recover_bins(ExecPolicy::parallel, values, basis, params.enc, params.field, table, nested, 0x5eed);
    std::set<u64> out;
    for (const auto& b : bins) out.insert(b.valid.begin(), b.valid.end());
    return {out.begin(), out.end()};
}

}  // namespace

ChannelSet ChannelSet::all() {
    ChannelSet s;
    s.bits_.set();
    return s;
}

std::size_t ChannelSet::index(Party from, Party to) {
    for (std::size_t i = 0; i < 6; ++i)
        if (kChannels[i].first == from && kChannels[i].second == to) return i;
    throw ConfigError("a party cannot send to itself");
}

void ChannelSet::add(Party from, Party to) { bits_.set(index(from, to)); }

bool ChannelSet::contains(Party from, Party to) const { return from != to && bits_.test(index(from, to)); }

std::string ChannelSet::str() const {
    std::string s;
    for (std::size_t i = 0; i < 6; ++i) {
        if (!bits_.test(i)) continue;
        if (!s.empty()) s += ',';
        s += static_cast<char>(kChannels[i].first);
        s += '>';
        s += static_cast<char>(kChannels[i].second);
    }
    return s;
}

ChannelSet parse_channels(std::string_view text) {
    if (text == "all") return ChannelSet::all();
    ChannelSet s;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) continue;
        if (item.size() != 3 || item[1] != '>')
            throw ConfigError("bad channel '" + std::string(item) + "', expected the form A>B");
        s.add(parse_party(item[0]), parse_party(item[2]));
    }
    return s;
}

EavesdropperView EavesdropperView::capture(const PublicParams& params, const Transcript& t, ChannelSet channels) {
    EavesdropperView v{params, channels, {}};
    for (const auto& e : t.entries())
        if (channels.contains(e.message.from, e.message.to)) v.messages.push_back(e);
    return v;
}

EavesdropperView EavesdropperView::from_file_bytes(std::span<const std::uint8_t> bytes, ChannelSet channels) {
    auto [params, transcript] = decode_transcript_file(bytes);
    return capture(params, transcript, channels);
}

nlohmann::json AttackReport::to_json() const {
    nlohmann::json j;
    j["attack"] = attack;
    j["applicable"] = applicable;
    j["recovered"] = recovered;
    j["matched_truth"] = matched_truth ? nlohmann::json(*matched_truth) : nlohmann::json(nullptr);
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

AttackReport attack_eo_keyleak(const EavesdropperView& view) {
    const auto& params = view.params;
    auto* start = find_payload<StartRequestWithKey>(view, Party::B, Party::A);
    if (!start) return not_applicable(kAttackKeyLeak, "no B>A message carrying mk_B in view");
    auto* ob = find_outsource(view, Party::B);
    if (!ob || ob->o.kind != MatrixKind::o_additive || !has_shape(ob->o.m, params))
        return not_applicable(kAttackKeyLeak, "no additively blinded o^B on B>C in view");

    auto z_b = kernels::expand_blinding(ExecPolicy::parallel, start->mk_b, params.h(), params.n(), false, params.field);
    Tally scratch;
    auto tau = kernels::subtract(ExecPolicy::parallel, ob->o.m, z_b, params.field, scratch);
    AttackReport r;
    r.attack = std::string(kAttackKeyLeak);
    r.applicable = true;
    r.recovered = decode_rows(tau, params);
    return r;
}

AttackReport attack_eo_subtract(const EavesdropperView& view) {
    const auto& params = view.params;
    auto* q = find_payload<QToB>(view, Party::A, Party::B);
    auto* t = find_payload<CloudResultEO>(view, Party::C, Party::B);
    if (!q || !t) return not_applicable(kAttackSubtract, "needs q on A>B and t on C>B");
    if (!has_shape(q->q.m, params) || !has_shape(t->t.m, params))
        return not_applicable(kAttackSubtract, "captured matrices do not match the public parameters");
    Tally scratch;
    auto g = kernels::subtract(ExecPolicy::parallel, t->t.m, q->q.m, params.field, scratch);
    AttackReport r;
    r.attack = std::string(kAttackSubtract);
    r.applicable = true;
    r.recovered = decode_rows(g, params);
    return r;
}

std::optional<Polynomial> unblind_a_bin(std::span<const u64> q_row, std::span<const u64> o_a_row,
                                        std::span<const u64> z_b_row, std::span<const u64> pad_row,
                                        const Polynomial& omega_a, const Polynomial& omega_b,
                                        std::span<const FieldElement> xs, std::size_t degree, const PrimeField& field) {
    Arith quiet(field);
    PointValuePoly pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        u64 wa = eval_horner(omega_a, xs[i], quiet).value();
        if (wa == 0) continue;
        u64 wb = eval_horner(omega_b, xs[i], quiet).value();
        u64 num = field.sub(field.sub(q_row[i], field.mul(z_b_row[i], wb)), pad_row[i]);
        u64 z_a = field.mul(num, field.inv(wa));
        pts.xs.push_back(xs[i]);
        pts.ys.push_back(FieldElement::raw(field.sub(o_a_row[i], z_a), field.modulus()));
    }
    if (pts.xs.size() < degree + 1) return std::nullopt;
    return interpolate(pts, quiet);
}

AttackReport attack_eo_unblind_a(const EavesdropperView& view) {
    const auto& params = view.params;
    auto* start = find_payload<StartRequestWithKey>(view, Party::B, Party::A);
    auto* deleg = find_payload<DelegationKeyToCloud>(view, Party::A, Party::C);
    auto* oa = find_outsource(view, Party::A);
    auto* q = find_payload<QToB>(view, Party::A, Party::B);
    if (!start) return not_applicable(kAttackUnblindA, "no B>A message carrying mk_B in view");
    if (!deleg) return not_applicable(kAttackUnblindA, "no A>C message carrying tk in view");
    if (!oa || oa->o.kind != MatrixKind::o_additive) return not_applicable(kAttackUnblindA, "no additively blinded o^A on A>C in view");
    if (!q) return not_applicable(kAttackUnblindA, "no q on A>B in view");
    if (!has_shape(oa->o.m, params) || !has_shape(q->q.m, params))
        return not_applicable(kAttackUnblindA, "captured matrices do not match the public parameters");

    auto masks = eo_masks(deleg->tk, params);
    auto z_b = kernels::expand_blinding(ExecPolicy::parallel, start->mk_b, params.h(), params.n(), false, params.field);
    Arith quiet(params.field);
    std::set<u64> out;
    std::size_t skipped = 0;
    for (std::size_t j = 0; j < params.h(); ++j) {
        auto tau = unblind_a_bin(q->q.m.row(j), oa->o.m.row(j), z_b.row(j), masks.a.row(j), masks.omega_a[j],
                                 masks.omega_b[j], params.xs, params.d(), params.field);
        if (!tau) {
            ++skipped;
            continue;
        }
        if (tau->is_zero()) continue;
        for (auto root : find_roots(*tau, quiet))
            if (auto s = decode_valid_root(root, params.enc)) out.insert(*s);
    }
    AttackReport r;
    r.attack = std::string(kAttackUnblindA);
    r.applicable = true;
    r.recovered.assign(out.begin(), out.end());
    if (skipped) r.detail = std::to_string(skipped) + " bins had too few usable points";
    return r;
}

AttackReport analyze_improved_qprime(const EavesdropperView& view) {
    const auto& params = view.params;
    auto* res = find_payload<CloudResultImproved>(view, Party::C, Party::B);
    if (!res) return not_applicable(kAnalysisQPrime, "no q' on C>B in view");
    if (!has_shape(res->q_prime.m, params))
        return not_applicable(kAnalysisQPrime, "captured q' does not match the public parameters");
    AttackReport r;
    r.attack = std::string(kAnalysisQPrime);
    r.applicable = true;
    r.recovered = decode_rows(res->q_prime.m, params);
    return r;
}

std::vector<AttackReport> run_all_attacks(const EavesdropperView& view) {
    return {attack_eo_keyleak(view), attack_eo_subtract(view), attack_eo_unblind_a(view), analyze_improved_qprime(view)};
}

std::vector<KeyHit> scan_key_material(const Transcript& transcript, std::span<const LabeledKey> keys) {
    std::vector<KeyHit> hits;
    const auto& entries = transcript.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& bytes = entries[i].bytes;
        for (const auto& k : keys) {
            const auto& kb = k.key.bytes();
            if (std::search(bytes.begin(), bytes.end(), kb.begin(), kb.end()) != bytes.end()) hits.push_back({i, k.label});
        }
    }
    return hits;
}

}  // namespace dpsi

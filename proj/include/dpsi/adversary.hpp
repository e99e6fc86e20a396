#pragma once

#include <bitset>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpsi/params.hpp"
#include "dpsi/poly.hpp"
#include "dpsi/wire.hpp"

namespace dpsi {

/// Directed channels an eavesdropper taps. Bit order: A>B, B>A, A>C, C>A, B>C, C>B.
class ChannelSet {
public:
    static ChannelSet all();
    static ChannelSet none() { return {}; }

    void add(Party from, Party to);
    bool contains(Party from, Party to) const;
    bool operator==(const ChannelSet&) const = default;
    std::string str() const;

private:
    static std::size_t index(Party from, Party to);
    std::bitset<6> bits_;
};

/// "all", "" (none) or a comma list such as "A>B,B>A". Throws ConfigError.
ChannelSet parse_channels(std::string_view text);

/// What a passive observer of the selected channels holds: the public
/// parameters and the captured messages, nothing else.
struct EavesdropperView {
    PublicParams params;
    ChannelSet channels;
    std::vector<TranscriptEntry> messages;

    static EavesdropperView capture(const PublicParams& params, const Transcript& t, ChannelSet channels);
    /// From a transcript file as written by the CLI.
    static EavesdropperView from_file_bytes(std::span<const std::uint8_t> bytes, ChannelSet channels);
};

struct AttackReport {
    std::string attack;
    bool applicable = false;
    std::vector<u64> recovered;          // ascending
    std::optional<bool> matched_truth;   // filled by a harness holding the real inputs
    std::string detail;

    nlohmann::json to_json() const;
};

inline constexpr std::string_view kAttackKeyLeak = "eo_keyleak";
inline constexpr std::string_view kAttackSubtract = "eo_subtract";
inline constexpr std::string_view kAttackUnblindA = "eo_unblind_a";
inline constexpr std::string_view kAnalysisQPrime = "improved_qprime";

/// mk_B from B>A plus o^B from B>C: unblind, interpolate, factor. Recovers S_B.
AttackReport attack_eo_keyleak(const EavesdropperView& view);
/// q from A>B and t from C>B: g = t - q. Recovers the intersection.
AttackReport attack_eo_subtract(const EavesdropperView& view);
/// mk_B, tk, o^A and q: solve for z^A, unblind o^A. Recovers S_A.
AttackReport attack_eo_unblind_a(const EavesdropperView& view);
/// Interpolates q' = omega^A * tau^A per bin and decodes the valid roots.
AttackReport analyze_improved_qprime(const EavesdropperView& view);

/// Every attack plus the q' analysis, in a fixed order.
std::vector<AttackReport> run_all_attacks(const EavesdropperView& view);

/// One bin of the z^A solve. Points where omega_a(x_i) = 0 are skipped; the
/// remaining points (at least d+1 of them) give tau^A through interpolation.
/// Returns nullopt when fewer than degree+1 points survive.
std::optional<Polynomial> unblind_a_bin(std::span<const u64> q_row, std::span<const u64> o_a_row,
                                        std::span<const u64> z_b_row, std::span<const u64> pad_row,
                                        const Polynomial& omega_a, const Polynomial& omega_b,
                                        std::span<const FieldElement> xs, std::size_t degree, const PrimeField& field);

struct KeyHit {
    std::size_t index;  // position in the transcript
    std::string label;

    bool operator==(const KeyHit&) const = default;
};

struct LabeledKey {
    std::string label;
    Key key;
};

/// Byte-substring search of every serialized message for every key.
std::vector<KeyHit> scan_key_material(const Transcript& transcript, std::span<const LabeledKey> keys);

}  // namespace dpsi

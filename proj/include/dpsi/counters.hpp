#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dpsi {

enum class Party : std::uint8_t { A = 'A', B = 'B', C = 'C' };

enum class Phase : std::uint8_t { setup = 0, outsource = 1, online = 2 };

std::string_view to_string(Party p);
std::string_view to_string(Phase p);

/// Operation tallies in the units of the complexity tables.
/// Subtraction and negation are tallied as additions.
struct Tally {
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;
    std::uint64_t invs = 0;
    std::uint64_t interpolations = 0;
    std::uint64_t factorizations = 0;

    Tally& operator+=(const Tally& o) {
        adds += o.adds;
        muls += o.muls;
        invs += o.invs;
        interpolations += o.interpolations;
        factorizations += o.factorizations;
        return *this;
    }
    friend Tally operator+(Tally a, const Tally& b) { return a += b; }
    bool operator==(const Tally&) const = default;
};

/// `table` holds what the complexity tables count. `nested` holds the field
/// operations performed inside interpolation and root finding, which the tables
/// count as single events.
struct PhaseCounts {
    Tally table;
    Tally nested;

    bool operator==(const PhaseCounts&) const = default;
};

/// Per-party, per-phase counters owned by one session.
class OpCounters {
public:
    PhaseCounts& at(Party party, Phase phase) { return cells_[index(party, phase)]; }
    const PhaseCounts& at(Party party, Phase phase) const { return cells_[index(party, phase)]; }

    Tally& table(Party party, Phase phase) { return at(party, phase).table; }
    const Tally& table(Party party, Phase phase) const { return at(party, phase).table; }
    Tally& nested(Party party, Phase phase) { return at(party, phase).nested; }
    const Tally& nested(Party party, Phase phase) const { return at(party, phase).nested; }

    bool operator==(const OpCounters&) const = default;

private:
    static std::size_t index(Party party, Phase phase) {
        std::size_t p = party == Party::A ? 0 : party == Party::B ? 1 : 2;
        return p * 3 + static_cast<std::size_t>(phase);
    }

    std::array<PhaseCounts, 9> cells_{};
};

}  // namespace dpsi

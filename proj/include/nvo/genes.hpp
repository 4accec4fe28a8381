#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace nvo {

inline constexpr std::size_t kRoundCount = 80;

/// Selector for one of the four per-round mixing functions:
///   F0: (b AND c) OR ((NOT b) AND d)
///   F1: b XOR c XOR d
///   F2: (b AND c) OR (b AND d) OR (c AND d)
///   F3: b XOR c XOR d
/// F1 and F3 share a truth table; they stay distinct codes and the overlap
/// is handled explicitly by functionally_equivalent().
enum class RoundFunctionId : std::uint8_t { F0 = 0, F1 = 1, F2 = 2, F3 = 3 };

/// Selector for one of the four 32-bit round constants.
enum class KOptionId : std::uint8_t { K0 = 0, K1 = 1, K2 = 2, K3 = 3 };

constexpr std::uint32_t k_constant(KOptionId id) {
    constexpr std::uint32_t table[4] = {0x5A827999u, 0x6ED9EBA1u, 0x8F1BBCDCu, 0xCA62C1D6u};
    return table[static_cast<std::size_t>(id)];
}

/// The 80 per-round diversification choices of one variant: which mixing
/// function and which constant every round uses.
struct GeneVector {
    std::array<RoundFunctionId, kRoundCount> fp{};
    std::array<KOptionId, kRoundCount> k{};

    friend bool operator==(const GeneVector&, const GeneVector&) = default;
};

/// The gene assignment that reproduces standard SHA-1: four phases of twenty
/// rounds each (F0/K0, F1/K1, F2/K2, F3/K3).
GeneVector canonical_genes();

/// True when two gene vectors compute the same function on every input:
/// equal constant options everywhere, and equal round-function options up to
/// the F1/F3 truth-table identity.
bool functionally_equivalent(const GeneVector& a, const GeneVector& b);

}  // namespace nvo

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nvo/genes.hpp"

namespace nvo {

/// 160 bits holding 80 two-bit gene codes. Gene i occupies bit 2i (high) and
/// bit 2i+1 (low); bit 0 is the most significant bit of the first byte, so
/// the 40-character hex form reads left to right in gene order.
struct Chromosome {
    std::array<std::uint8_t, 20> bits{};

    unsigned code_at(std::size_t gene) const;           // 0..3
    void set_code(std::size_t gene, unsigned code);

    std::string to_hex() const;                         // 40 lowercase hex chars
    static Chromosome from_hex(std::string_view hex);

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

static_assert(sizeof(Chromosome{}.bits) * 8 == 2 * kRoundCount,
              "one chromosome is two bits per gene");

/// The two chromosomes of one variant: round functions and constants.
struct ChromosomePair {
    Chromosome fp_chromosome;
    Chromosome k_chromosome;

    friend bool operator==(const ChromosomePair&, const ChromosomePair&) = default;
};

/// Code mapping: option 0..3 <-> bit code 00/01/10/11.
ChromosomePair encode(const GeneVector& genes);
GeneVector decode(const ChromosomePair& pair);

/// Draws 80+80 gene options uniformly from four choices each. With a seed
/// the draw is a pure function of the seed (one SplitMix64 output per gene,
/// fp genes first); without one the options come from OS entropy.
GeneVector random_genes(std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace nvo

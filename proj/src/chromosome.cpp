#include "nvo/chromosome.hpp"

#include <algorithm>

#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"

namespace nvo {

unsigned Chromosome::code_at(std::size_t gene) const {
    const std::size_t byte = gene / 4;
    const unsigned shift = 2 * (3 - gene % 4);  // gene 0 in the two MSBs
    return (bits[byte] >> shift) & 0x3u;
}

void Chromosome::set_code(std::size_t gene, unsigned code) {
    const std::size_t byte = gene / 4;
    const unsigned shift = 2 * (3 - gene % 4);
    bits[byte] = static_cast<std::uint8_t>((bits[byte] & ~(0x3u << shift)) |
                                           ((code & 0x3u) << shift));
}

std::string Chromosome::to_hex() const {
    return hex_encode(bits);
}

Chromosome Chromosome::from_hex(std::string_view hex) {
    if (hex.size() != 40) {
        throw ParseError("chromosome hex must be 40 characters, got " +
                         std::to_string(hex.size()));
    }
    auto raw = hex_decode(hex);
    Chromosome c;
    std::copy(raw.begin(), raw.end(), c.bits.begin());
    return c;
}

ChromosomePair encode(const GeneVector& genes) {
    ChromosomePair pair;
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        pair.fp_chromosome.set_code(i, static_cast<unsigned>(genes.fp[i]));
        pair.k_chromosome.set_code(i, static_cast<unsigned>(genes.k[i]));
    }
    return pair;
}

GeneVector decode(const ChromosomePair& pair) {
    GeneVector genes;
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        genes.fp[i] = static_cast<RoundFunctionId>(pair.fp_chromosome.code_at(i));
        genes.k[i] = static_cast<KOptionId>(pair.k_chromosome.code_at(i));
    }
    return genes;
}

GeneVector random_genes(std::optional<std::uint64_t> seed) {
    GeneVector genes;
    if (seed) {
        SplitMix64 stream(*seed);
        for (auto& f : genes.fp) f = static_cast<RoundFunctionId>(stream.next() & 0x3u);
        for (auto& k : genes.k) k = static_cast<KOptionId>(stream.next() & 0x3u);
    } else {
        std::array<std::uint8_t, 2 * kRoundCount> draws;
        fill_os_entropy(draws);
        for (std::size_t i = 0; i < kRoundCount; ++i) {
            genes.fp[i] = static_cast<RoundFunctionId>(draws[i] & 0x3u);
            genes.k[i] = static_cast<KOptionId>(draws[kRoundCount + i] & 0x3u);
        }
    }
    return genes;
}

}  // namespace nvo

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nvo/digest.hpp"
#include "nvo/genes.hpp"

namespace nvo {

using Block = std::array<std::uint8_t, 64>;        // one 512-bit message block
using Schedule = std::array<std::uint32_t, 80>;    // expanded message schedule

/// Chaining state between blocks. All arithmetic is modulo 2^32. The default
/// construction is the standard initial state; it is never diversified.
struct HashState {
    std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                                   0xC3D2E1F0u};

    friend bool operator==(const HashState&, const HashState&) = default;
};

/// The five working registers of the compression loop.
struct RoundRegisters {
    std::uint32_t a = 0, b = 0, c = 0, d = 0, e = 0;

    friend bool operator==(const RoundRegisters&, const RoundRegisters&) = default;
};

constexpr std::uint32_t rotl32(std::uint32_t x, unsigned n) {
    return (x << n) | (x >> (32u - n));
}

/// Append 0x80, zero-fill to 56 mod 64, append the 64-bit big-endian bit
/// length, and cut into 64-byte blocks. Message must be shorter than 2^61
/// bytes so the bit length fits the trailer.
std::vector<Block> pad_message(std::span<const std::uint8_t> message);

/// w[0..15] from the block big-endian; w[i] = rotl1(w[i-3]^w[i-8]^w[i-14]^w[i-16]).
Schedule expand_schedule(const Block& block);

std::uint32_t round_function(RoundFunctionId id, std::uint32_t b, std::uint32_t c,
                             std::uint32_t d);

/// One round tail: temp = rotl5(a) + f + e + k + w, then the register shift
/// e<-d, d<-c, c<-rotl30(b), b<-a, a<-temp.
RoundRegisters f_tail(const RoundRegisters& regs, std::uint32_t f, std::uint32_t k,
                      std::uint32_t w);

/// 80 rounds, each selecting the mixing function and constant from the gene
/// vector, followed by the chaining addition.
HashState compress_block(const HashState& state, const Schedule& w, const GeneVector& genes);

/// The parent path: one engine that mirrors any variant given its genes.
Digest digest(const GeneVector& genes, std::span<const std::uint8_t> message);
Digest digest(const GeneVector& genes, std::string_view message);

/// The child path: gene choices resolved once into a table of function
/// pointers and literal constants, the way a generated variant hardcodes
/// them. Exists so the parent engine can be checked against an independently
/// dispatched computation.
class SpecializedVariant {
public:
    explicit SpecializedVariant(const GeneVector& genes);

    Digest digest(std::span<const std::uint8_t> message) const;
    Digest digest(std::string_view message) const;

private:
    using RoundFn = std::uint32_t (*)(std::uint32_t, std::uint32_t, std::uint32_t);
    std::array<RoundFn, kRoundCount> fn_{};
    std::array<std::uint32_t, kRoundCount> k_{};
};

}  // namespace nvo

#include "nvo/sha1.hpp"

#include <cstring>

#include "nvo/errors.hpp"

namespace nvo {

namespace {

constexpr std::uint64_t kMaxMessageBytes = 1ull << 61;

std::uint32_t fn_choose(std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return (b & c) | (~b & d);
}
std::uint32_t fn_parity(std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return b ^ c ^ d;
}
std::uint32_t fn_majority(std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return (b & c) | (b & d) | (c & d);
}

}  // namespace

std::vector<Block> pad_message(std::span<const std::uint8_t> message) {
    if (message.size() >= kMaxMessageBytes) {
        throw Error("message too long for 64-bit length trailer");
    }
    const std::uint64_t bit_length = static_cast<std::uint64_t>(message.size()) * 8;
    const std::size_t total = (message.size() + 9 + 63) / 64 * 64;

    std::vector<Block> blocks(total / 64);
    auto* out = blocks.front().data();
    if (!message.empty()) std::memcpy(out, message.data(), message.size());
    out[message.size()] = 0x80;
    std::memset(out + message.size() + 1, 0, total - message.size() - 9);
    for (int i = 0; i < 8; ++i) {
        out[total - 8 + i] = static_cast<std::uint8_t>(bit_length >> (56 - 8 * i));
    }
    return blocks;
}

Schedule expand_schedule(const Block& block) {
    Schedule w;
    for (std::size_t i = 0; i < 16; ++i) {
        w[i] = (static_cast<std::uint32_t>(block[i * 4]) << 24) |
               (static_cast<std::uint32_t>(block[i * 4 + 1]) << 16) |
               (static_cast<std::uint32_t>(block[i * 4 + 2]) << 8) |
               static_cast<std::uint32_t>(block[i * 4 + 3]);
    }
    for (std::size_t i = 16; i < kRoundCount; ++i) {
        w[i] = rotl32(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    }
    return w;
}

std::uint32_t round_function(RoundFunctionId id, std::uint32_t b, std::uint32_t c,
                             std::uint32_t d) {
    switch (id) {
        case RoundFunctionId::F0: return fn_choose(b, c, d);
        case RoundFunctionId::F1: return fn_parity(b, c, d);
        case RoundFunctionId::F2: return fn_majority(b, c, d);
        case RoundFunctionId::F3: return fn_parity(b, c, d);
    }
    return 0;  // unreachable
}

RoundRegisters f_tail(const RoundRegisters& regs, std::uint32_t f, std::uint32_t k,
                      std::uint32_t w) {
    const std::uint32_t temp = rotl32(regs.a, 5) + f + regs.e + k + w;
    return RoundRegisters{temp, regs.a, rotl32(regs.b, 30), regs.c, regs.d};
}

HashState compress_block(const HashState& state, const Schedule& w, const GeneVector& genes) {
    RoundRegisters r{state.h[0], state.h[1], state.h[2], state.h[3], state.h[4]};
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        const std::uint32_t f = round_function(genes.fp[i], r.b, r.c, r.d);
        r = f_tail(r, f, k_constant(genes.k[i]), w[i]);
    }
    HashState next = state;
    next.h[0] += r.a;
    next.h[1] += r.b;
    next.h[2] += r.c;
    next.h[3] += r.d;
    next.h[4] += r.e;
    return next;
}

Digest digest(const GeneVector& genes, std::span<const std::uint8_t> message) {
    HashState state;
    for (const Block& block : pad_message(message)) {
        state = compress_block(state, expand_schedule(block), genes);
    }
    return Digest::from_words(state.h);
}

Digest digest(const GeneVector& genes, std::string_view message) {
    return digest(genes, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(message.data()),
                             message.size()));
}

GeneVector canonical_genes() {
    GeneVector g;
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        g.fp[i] = static_cast<RoundFunctionId>(i / 20);
        g.k[i] = static_cast<KOptionId>(i / 20);
    }
    return g;
}

bool functionally_equivalent(const GeneVector& a, const GeneVector& b) {
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        if (a.k[i] != b.k[i]) return false;
        auto fa = a.fp[i];
        auto fb = b.fp[i];
        if (fa == RoundFunctionId::F3) fa = RoundFunctionId::F1;
        if (fb == RoundFunctionId::F3) fb = RoundFunctionId::F1;
        if (fa != fb) return false;
    }
    return true;
}

SpecializedVariant::SpecializedVariant(const GeneVector& genes) {
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        switch (genes.fp[i]) {
            case RoundFunctionId::F0: fn_[i] = fn_choose; break;
            case RoundFunctionId::F1: fn_[i] = fn_parity; break;
            case RoundFunctionId::F2: fn_[i] = fn_majority; break;
            case RoundFunctionId::F3: fn_[i] = fn_parity; break;
        }
        k_[i] = k_constant(genes.k[i]);
    }
}

Digest SpecializedVariant::digest(std::span<const std::uint8_t> message) const {
    HashState state;
    for (const Block& block : pad_message(message)) {
        const Schedule w = expand_schedule(block);
        std::uint32_t a = state.h[0], b = state.h[1], c = state.h[2], d = state.h[3],
                      e = state.h[4];
        for (std::size_t i = 0; i < kRoundCount; ++i) {
            const std::uint32_t temp = rotl32(a, 5) + fn_[i](b, c, d) + e + k_[i] + w[i];
            e = d;
            d = c;
            c = rotl32(b, 30);
            b = a;
            a = temp;
        }
        state.h[0] += a;
        state.h[1] += b;
        state.h[2] += c;
        state.h[3] += d;
        state.h[4] += e;
    }
    return Digest::from_words(state.h);
}

Digest SpecializedVariant::digest(std::string_view message) const {
    return digest(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
}

}  // namespace nvo

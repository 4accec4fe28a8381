#pragma once

// Byte-oriented streaming SHA-1 used as the independent oracle for the
// canonical case. Deliberately structured unlike the library engine:
// incremental context, sixteen-word circular schedule window, if/else round
// phases. Test-only; must never call into the library.

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace testref {

class Sha1 {
public:
    Sha1() { reset(); }

    void reset() {
        h_ = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
        buffered_ = 0;
        total_ = 0;
    }

    void update(const void* data, std::size_t length) {
        const auto* bytes = static_cast<const std::uint8_t*>(data);
        total_ += length;
        for (std::size_t i = 0; i < length; ++i) {
            buffer_[buffered_++] = bytes[i];
            if (buffered_ == 64) {
                transform();
                buffered_ = 0;
            }
        }
    }

    std::array<std::uint8_t, 20> finish() {
        const std::uint64_t bit_count = total_ * 8;
        const std::uint8_t one = 0x80, zero = 0x00;
        update(&one, 1);
        while (buffered_ != 56) update(&zero, 1);
        for (int i = 7; i >= 0; --i) {
            const auto b = static_cast<std::uint8_t>(bit_count >> (8 * i));
            update(&b, 1);
        }
        std::array<std::uint8_t, 20> out{};
        for (std::size_t i = 0; i < 5; ++i) {
            out[4 * i + 0] = static_cast<std::uint8_t>(h_[i] >> 24);
            out[4 * i + 1] = static_cast<std::uint8_t>(h_[i] >> 16);
            out[4 * i + 2] = static_cast<std::uint8_t>(h_[i] >> 8);
            out[4 * i + 3] = static_cast<std::uint8_t>(h_[i]);
        }
        return out;
    }

private:
    static std::uint32_t rol(std::uint32_t x, unsigned n) {
        return (x << n) | (x >> (32 - n));
    }

    void transform() {
        std::uint32_t win[16];
        for (int i = 0; i < 16; ++i) {
            win[i] = (std::uint32_t(buffer_[4 * i]) << 24) |
                     (std::uint32_t(buffer_[4 * i + 1]) << 16) |
                     (std::uint32_t(buffer_[4 * i + 2]) << 8) | std::uint32_t(buffer_[4 * i + 3]);
        }
        std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
        for (int t = 0; t < 80; ++t) {
            const std::uint32_t w = word(win, t);
            std::uint32_t f, k;
            if (t < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (t < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (t < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t tmp = rol(a, 5) + f + e + k + w;
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = tmp;
        }
        h_[0] += a;
        h_[1] += b;
        h_[2] += c;
        h_[3] += d;
        h_[4] += e;
    }

    // Sixteen-word circular window; words 16..79 are produced in place.
    static std::uint32_t word(std::uint32_t win[16], int t) {
        if (t < 16) return win[t];
        const std::uint32_t v = rol(win[(t - 3) & 15] ^ win[(t - 8) & 15] ^ win[(t - 14) & 15] ^
                                        win[t & 15],
                                    1);
        win[t & 15] = v;
        return v;
    }

    std::array<std::uint32_t, 5> h_{};
    std::uint8_t buffer_[64]{};
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

inline std::array<std::uint8_t, 20> sha1_bytes(std::span<const std::uint8_t> message) {
    Sha1 ctx;
    ctx.update(message.data(), message.size());
    return ctx.finish();
}

inline std::string sha1_hex(std::span<const std::uint8_t> message) {
    static const char* digits = "0123456789abcdef";
    const auto raw = sha1_bytes(message);
    std::string out;
    for (std::uint8_t b : raw) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

inline std::string sha1_hex(std::string_view message) {
    return sha1_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
}

// The full 80-word schedule of one 64-byte block, computed with the circular
// window rather than the straight recurrence.
inline std::array<std::uint32_t, 80> schedule_words(const std::array<std::uint8_t, 64>& block) {
    std::uint32_t win[16];
    for (int i = 0; i < 16; ++i) {
        win[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                 (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    }
    std::array<std::uint32_t, 80> out{};
    for (int t = 0; t < 80; ++t) {
        if (t < 16) {
            out[t] = win[t];
        } else {
            const std::uint32_t v =
                ((win[(t - 3) & 15] ^ win[(t - 8) & 15] ^ win[(t - 14) & 15] ^ win[t & 15])
                     << 1) |
                ((win[(t - 3) & 15] ^ win[(t - 8) & 15] ^ win[(t - 14) & 15] ^ win[t & 15]) >>
                 31);
            win[t & 15] = v;
            out[t] = v;
        }
    }
    return out;
}

}  // namespace testref

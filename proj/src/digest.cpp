#include "nvo/digest.hpp"

#include <algorithm>

#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"

namespace nvo {

std::string Digest::to_hex() const {
    return hex_encode(bytes);
}

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 40) {
        throw ParseError("digest hex must be 40 characters, got " + std::to_string(hex.size()));
    }
    auto raw = hex_decode(hex);
    Digest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

Digest Digest::from_words(const std::array<std::uint32_t, 5>& words) {
    Digest d;
    for (std::size_t i = 0; i < 5; ++i) {
        d.bytes[i * 4 + 0] = static_cast<std::uint8_t>(words[i] >> 24);
        d.bytes[i * 4 + 1] = static_cast<std::uint8_t>(words[i] >> 16);
        d.bytes[i * 4 + 2] = static_cast<std::uint8_t>(words[i] >> 8);
        d.bytes[i * 4 + 3] = static_cast<std::uint8_t>(words[i]);
    }
    return d;
}

bool constant_time_equal(const Digest& a, const Digest& b) {
    unsigned diff = 0;
    for (std::size_t i = 0; i < a.bytes.size(); ++i) {
        diff |= static_cast<unsigned>(a.bytes[i] ^ b.bytes[i]);
    }
    return diff == 0;
}

}  // namespace nvo

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace nvo {

/// A 160-bit hash value. Bytes hold the big-endian rendering of the five
/// 32-bit chaining words (h0 first), so the hex form matches sha1sum output.
struct Digest {
    std::array<std::uint8_t, 20> bytes{};

    std::string to_hex() const;  // 40 lowercase hex characters
    static Digest from_hex(std::string_view hex);
    static Digest from_words(const std::array<std::uint32_t, 5>& words);

    friend bool operator==(const Digest&, const Digest&) = default;
};

/// Equality that does not short-circuit on the first differing byte.
bool constant_time_equal(const Digest& a, const Digest& b);

}  // namespace nvo

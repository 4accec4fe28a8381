#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nvo {

std::string hex_encode(std::span<const std::uint8_t> bytes);  // lowercase
std::vector<std::uint8_t> hex_decode(std::string_view hex);   // accepts both cases

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::vector<std::uint8_t> to_bytes(std::string_view text);

/// Deterministic 64-bit stream: a keyed bit-mixing permutation applied to an
/// incrementing counter (splitmix64). Fixed arithmetic, identical output on
/// every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// OS entropy (std::random_device). Safe for concurrent callers.
std::uint64_t os_entropy64();
void fill_os_entropy(std::span<std::uint8_t> out);

}  // namespace nvo

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nvo/digest.hpp"
#include "nvo/genes.hpp"

namespace nvo::mac {

using Nonce = std::array<std::uint8_t, 16>;

inline constexpr std::size_t kMinClientIdBytes = 1;
inline constexpr std::size_t kMaxClientIdBytes = 256;
inline constexpr std::size_t kMaxPayloadBytes = 1u << 20;

/// One authenticated request as it travels to the server. Field bounds are
/// enforced at construction through make().
struct MacRequest {
    std::string client_id;               // 1..256 bytes of UTF-8
    Nonce nonce{};
    std::vector<std::uint8_t> payload;   // <= 1 MiB
    Digest mac;

    static MacRequest make(std::string client_id, const Nonce& nonce,
                           std::vector<std::uint8_t> payload, const Digest& mac);
};

/// Length-prefixed concatenation: 4-byte big-endian length before each of
/// (client_id bytes, nonce, payload). Injective over the field tuple.
std::vector<std::uint8_t> canonicalize(std::string_view client_id, const Nonce& nonce,
                                       std::span<const std::uint8_t> payload);

/// Hook invoked before every compute_mac, so an integrity check rides along
/// with MAC calculation. An empty hook clears it. The hook must be safe to
/// invoke concurrently or callers must serialize.
using GuardHook = std::function<void()>;
void set_guard_hook(GuardHook hook);

/// digest(genes, canonicalize(...)), with the guard hook (if any) run first.
Digest compute_mac(const GeneVector& genes, std::string_view client_id, const Nonce& nonce,
                   std::span<const std::uint8_t> payload);

/// MacRequest with the MAC filled in from the given genes.
MacRequest build_request(const GeneVector& genes, std::string client_id, const Nonce& nonce,
                         std::vector<std::uint8_t> payload);

/// Constant-time comparison of the recomputed MAC with request.mac.
bool verify_mac(const GeneVector& genes, const MacRequest& request);

/// 16 fresh bytes from OS entropy.
Nonce random_nonce();

}  // namespace nvo::mac

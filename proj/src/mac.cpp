#include "nvo/mac.hpp"

#include <mutex>

#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/sha1.hpp"

namespace nvo::mac {

namespace {

void check_bounds(std::string_view client_id, std::size_t payload_size) {
    if (client_id.size() < kMinClientIdBytes || client_id.size() > kMaxClientIdBytes) {
        throw EncodingError("client_id must be 1..256 bytes, got " +
                            std::to_string(client_id.size()));
    }
    if (payload_size > kMaxPayloadBytes) {
        throw EncodingError("payload exceeds 1 MiB: " + std::to_string(payload_size));
    }
}

void append_field(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> field) {
    const std::uint32_t length = static_cast<std::uint32_t>(field.size());
    out.push_back(static_cast<std::uint8_t>(length >> 24));
    out.push_back(static_cast<std::uint8_t>(length >> 16));
    out.push_back(static_cast<std::uint8_t>(length >> 8));
    out.push_back(static_cast<std::uint8_t>(length));
    out.insert(out.end(), field.begin(), field.end());
}

std::mutex guard_hook_mutex;
GuardHook guard_hook;

}  // namespace

MacRequest MacRequest::make(std::string client_id, const Nonce& nonce,
                            std::vector<std::uint8_t> payload, const Digest& mac) {
    check_bounds(client_id, payload.size());
    return MacRequest{std::move(client_id), nonce, std::move(payload), mac};
}

std::vector<std::uint8_t> canonicalize(std::string_view client_id, const Nonce& nonce,
                                       std::span<const std::uint8_t> payload) {
    check_bounds(client_id, payload.size());
    std::vector<std::uint8_t> out;
    out.reserve(12 + client_id.size() + nonce.size() + payload.size());
    append_field(out, std::span(reinterpret_cast<const std::uint8_t*>(client_id.data()),
                                client_id.size()));
    append_field(out, nonce);
    append_field(out, payload);
    return out;
}

void set_guard_hook(GuardHook hook) {
    std::lock_guard lock(guard_hook_mutex);
    guard_hook = std::move(hook);
}

Digest compute_mac(const GeneVector& genes, std::string_view client_id, const Nonce& nonce,
                   std::span<const std::uint8_t> payload) {
    GuardHook hook;
    {
        std::lock_guard lock(guard_hook_mutex);
        hook = guard_hook;
    }
    if (hook) hook();
    return digest(genes, canonicalize(client_id, nonce, payload));
}

MacRequest build_request(const GeneVector& genes, std::string client_id, const Nonce& nonce,
                         std::vector<std::uint8_t> payload) {
    const Digest mac = compute_mac(genes, client_id, nonce, payload);
    return MacRequest::make(std::move(client_id), nonce, std::move(payload), mac);
}

bool verify_mac(const GeneVector& genes, const MacRequest& request) {
    const Digest expected =
        compute_mac(genes, request.client_id, request.nonce, request.payload);
    return constant_time_equal(expected, request.mac);
}

Nonce random_nonce() {
    Nonce nonce;
    fill_os_entropy(nonce);
    return nonce;
}

}  // namespace nvo::mac

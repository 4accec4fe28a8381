#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "nvo/genes.hpp"
#include "nvo/guard.hpp"
#include "nvo/wire.hpp"

namespace nvo::client {

/// How a context computes MACs: genes held in-process (test mode), or a
/// built variant executable that digests its standard input (delivered
/// mode). Exactly one is present by construction.
struct EmbeddedGenes {
    GeneVector genes;
};
struct VariantExecutable {
    std::filesystem::path path;
};
using MacBackend = std::variant<EmbeddedGenes, VariantExecutable>;

struct GuardPolicy {
    std::optional<guard::MapsSource> maps_source;  // unset: guard not run
    guard::SegmentDictionary dictionary;
    bool abort_on_violation = true;
    guard::Reaction reaction;
};

struct ClientContext {
    std::string client_id;
    std::string server_host = "127.0.0.1";
    int server_port = 0;

    std::optional<std::filesystem::path> variant_source_path;  // set by client_register
    std::optional<MacBackend> backend;                         // what client_send uses
    GuardPolicy guard;
};

struct DeliveredVariant {
    std::string variant_ref;
    std::string delivery_token;
    std::string source_text;
};

/// POST /register. Stores the delivered source at dest_path and records the
/// path in the context. Duplicate-id rejections and network failures are
/// surfaced; the context is unchanged on failure.
DeliveredVariant client_register(ClientContext& ctx, const std::filesystem::path& dest_path);

/// Runs the guard (violations invoke the reaction and, with the abort policy
/// active, raise GuardViolationError before any bytes leave the host), draws
/// a fresh nonce, computes the MAC through the context's backend, and POSTs
/// to /verify.
wire::Verdict client_send(ClientContext& ctx, std::span<const std::uint8_t> payload);

}  // namespace nvo::client

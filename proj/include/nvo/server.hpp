#pragma once

#include <cstdint>
#include <ctime>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nvo/chromosome.hpp"
#include "nvo/codegen.hpp"
#include "nvo/encoding.hpp"
#include "nvo/mac.hpp"
#include "nvo/wire.hpp"

namespace nvo::server {

std::string iso8601_utc(std::time_t t);
std::time_t parse_iso8601_utc(std::string_view text);

/// One registered client: identity plus the chromosomes of its variant.
struct ClientRecord {
    std::string client_id;
    ChromosomePair chromosomes;
    std::time_t assigned_at = 0;  // UTC, seconds precision

    friend bool operator==(const ClientRecord&, const ClientRecord&) = default;
};

/// The identity -> chromosomes mapping. A value type; thread safety lives in
/// ServerCore. File format, one record per line:
///   <client_id> TAB <fp hex> TAB <k hex> TAB <iso8601>
struct NVersionDatabase {
    std::vector<ClientRecord> records;
    std::filesystem::path backing_file;

    const ClientRecord* find(std::string_view client_id) const;

    friend bool operator==(const NVersionDatabase& a, const NVersionDatabase& b) {
        return a.records == b.records;
    }
};

NVersionDatabase load_db(const std::filesystem::path& path);
/// Write-temp-then-rename; the on-disk file is never half-written.
void save_db(const NVersionDatabase& db);

/// Bounded per-client nonce memory for replay detection.
class ReplayCache {
public:
    explicit ReplayCache(std::size_t window = 1024);

    bool seen(const std::string& client_id, const mac::Nonce& nonce) const;
    /// Returns false (and records nothing) when the nonce was already known.
    bool record(const std::string& client_id, const mac::Nonce& nonce);

private:
    struct PerClient {
        std::deque<std::string> order;
        std::unordered_set<std::string> known;
    };
    std::size_t window_;
    std::unordered_map<std::string, PerClient> clients_;
};

struct ServerConfig {
    std::filesystem::path db_path;        // empty: in-memory only
    std::size_t replay_window = 1024;
    bool unique_assignment = false;       // a variant may serve one client only
    std::optional<std::uint64_t> seed;    // deterministic selection for experiments
};

/// Registration, lookup, and verification against one database snapshot.
/// Verifications run concurrently under a shared lock; registrations are
/// serialized writers and persist atomically before returning.
class ServerCore {
public:
    ServerCore(ServerConfig config, std::vector<codegen::PoolEntry> pool);

    struct Registration {
        ClientRecord record;
        std::size_t pool_index;
        std::string variant_ref;
        std::string delivery_token;   // receipt for this delivery, 32 hex chars
        const codegen::PoolEntry* variant;
    };

    /// Picks a pool variant uniformly at random, records and persists the
    /// mapping, and returns the variant for delivery. Chromosomes never
    /// leave in gene form; only the rendered variant is delivered.
    Registration register_client(const std::string& client_id);

    GeneVector lookup_genes(const std::string& client_id) const;

    /// unknown-client, then replay, then bad-mac, else accepted; the nonce is
    /// recorded only on acceptance.
    wire::Verdict handle_verify(const mac::MacRequest& request);

    const std::vector<codegen::PoolEntry>& pool() const { return pool_; }
    const ServerConfig& config() const { return config_; }
    NVersionDatabase snapshot_db() const;

private:
    ServerConfig config_;
    std::vector<codegen::PoolEntry> pool_;
    NVersionDatabase db_;
    ReplayCache replay_;
    SplitMix64 rng_;

    mutable std::shared_mutex db_mutex_;
    mutable std::mutex replay_mutex_;

    std::size_t pick_pool_index();
};

/// HTTP face of ServerCore: POST /register and POST /verify with JSON
/// bodies. Kept behind a pimpl so the header stays light.
class HttpServer {
public:
    explicit HttpServer(ServerCore& core);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    bool bind(const std::string& host, int port);
    int bind_any_port(const std::string& host);  // returns the chosen port
    bool run();                                  // blocking; call after bind
    void stop();
    bool wait_until_ready(int timeout_ms = 2000) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace nvo::server

#include "nvo/server.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nvo/errors.hpp"

namespace nvo::server {

namespace fs = std::filesystem;

namespace {

std::string nonce_key(const mac::Nonce& nonce) {
    return std::string(reinterpret_cast<const char*>(nonce.data()), nonce.size());
}

void check_client_id(const std::string& id) {
    if (id.empty() || id.size() > mac::kMaxClientIdBytes) {
        throw EncodingError("client_id must be 1..256 bytes");
    }
    // The database file is line- and tab-delimited.
    if (id.find_first_of("\t\r\n") != std::string::npos) {
        throw EncodingError("client_id must not contain tabs or newlines");
    }
}

}  // namespace

std::string iso8601_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::time_t parse_iso8601_utc(std::string_view text) {
    std::tm tm{};
    char zone = 0;
    if (std::sscanf(std::string(text).c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &tm.tm_year,
                    &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec,
                    &zone) != 7 ||
        zone != 'Z') {
        throw ParseError("bad timestamp '" + std::string(text) + "'");
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return timegm(&tm);
}

const ClientRecord* NVersionDatabase::find(std::string_view client_id) const {
    for (const ClientRecord& record : records) {
        if (record.client_id == client_id) return &record;
    }
    return nullptr;
}

NVersionDatabase load_db(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read database " + path.string());

    NVersionDatabase db;
    db.backing_file = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string, 4> field;
        std::size_t start = 0;
        for (std::size_t f = 0; f < 4; ++f) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos && f < 3) {
                throw ParseError("record needs 4 tab-separated fields", line_no);
            }
            field[f] = line.substr(start, tab == std::string::npos ? tab : tab - start);
            start = tab + 1;
        }
        if (field[0].empty()) throw ParseError("empty client_id", line_no);
        if (db.find(field[0])) throw ParseError("duplicate client_id " + field[0], line_no);

        ClientRecord record;
        record.client_id = field[0];
        try {
            record.chromosomes.fp_chromosome = Chromosome::from_hex(field[1]);
            record.chromosomes.k_chromosome = Chromosome::from_hex(field[2]);
            record.assigned_at = parse_iso8601_utc(field[3]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        db.records.push_back(std::move(record));
    }
    return db;
}

void save_db(const NVersionDatabase& db) {
    if (db.backing_file.empty()) {
        throw IoError("database has no backing file");
    }
    const fs::path tmp = db.backing_file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        for (const ClientRecord& record : db.records) {
            out << record.client_id << '\t' << record.chromosomes.fp_chromosome.to_hex() << '\t'
                << record.chromosomes.k_chromosome.to_hex() << '\t'
                << iso8601_utc(record.assigned_at) << '\n';
        }
        out.flush();
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, db.backing_file, ec);
    if (ec) throw IoError("cannot replace " + db.backing_file.string() + ": " + ec.message());
}

ReplayCache::ReplayCache(std::size_t window) : window_(window) {}

bool ReplayCache::seen(const std::string& client_id, const mac::Nonce& nonce) const {
    const auto it = clients_.find(client_id);
    return it != clients_.end() && it->second.known.count(nonce_key(nonce)) > 0;
}

bool ReplayCache::record(const std::string& client_id, const mac::Nonce& nonce) {
    PerClient& entry = clients_[client_id];
    std::string key = nonce_key(nonce);
    if (entry.known.count(key)) return false;
    entry.order.push_back(key);
    entry.known.insert(std::move(key));
    while (entry.order.size() > window_) {
        entry.known.erase(entry.order.front());
        entry.order.pop_front();
    }
    return true;
}

ServerCore::ServerCore(ServerConfig config, std::vector<codegen::PoolEntry> pool)
    : config_(std::move(config)),
      pool_(std::move(pool)),
      replay_(config_.replay_window),
      rng_(config_.seed ? *config_.seed : os_entropy64()) {
    db_.backing_file = config_.db_path;
    if (!config_.db_path.empty() && fs::exists(config_.db_path)) {
        db_ = load_db(config_.db_path);
    }
}

std::size_t ServerCore::pick_pool_index() {
    if (pool_.empty()) throw PoolExhaustedError("variant pool is empty");
    if (!config_.unique_assignment) {
        return static_cast<std::size_t>(rng_.next() % pool_.size());
    }
    std::vector<std::size_t> free_indices;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
        const bool used = std::any_of(db_.records.begin(), db_.records.end(),
                                      [&](const ClientRecord& r) {
                                          return r.chromosomes == pool_[i].chromosomes;
                                      });
        if (!used) free_indices.push_back(i);
    }
    if (free_indices.empty()) {
        throw PoolExhaustedError("all " + std::to_string(pool_.size()) +
                                 " pool variants are assigned");
    }
    return free_indices[static_cast<std::size_t>(rng_.next() % free_indices.size())];
}

ServerCore::Registration ServerCore::register_client(const std::string& client_id) {
    check_client_id(client_id);
    std::unique_lock lock(db_mutex_);

    if (db_.find(client_id)) {
        throw AlreadyRegisteredError("client '" + client_id + "' is already registered");
    }
    const std::size_t index = pick_pool_index();

    ClientRecord record;
    record.client_id = client_id;
    record.chromosomes = pool_[index].chromosomes;
    record.assigned_at = std::time(nullptr);
    db_.records.push_back(record);
    if (!db_.backing_file.empty()) {
        save_db(db_);
    }

    std::array<std::uint8_t, 16> token;
    for (std::size_t i = 0; i < token.size(); i += 8) {
        const std::uint64_t word = rng_.next();
        for (std::size_t j = 0; j < 8; ++j) token[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }

    return Registration{std::move(record), index, codegen::PoolEntry::ref_name(index),
                        hex_encode(token), &pool_[index]};
}

GeneVector ServerCore::lookup_genes(const std::string& client_id) const {
    std::shared_lock lock(db_mutex_);
    const ClientRecord* record = db_.find(client_id);
    if (!record) throw NotFoundError("no client '" + client_id + "'");
    return decode(record->chromosomes);
}

wire::Verdict ServerCore::handle_verify(const mac::MacRequest& request) {
    ChromosomePair chromosomes;
    {
        std::shared_lock lock(db_mutex_);
        const ClientRecord* record = db_.find(request.client_id);
        if (!record) return wire::Verdict::reject(wire::RejectReason::UnknownClient);
        chromosomes = record->chromosomes;
    }
    {
        std::lock_guard lock(replay_mutex_);
        if (replay_.seen(request.client_id, request.nonce)) {
            return wire::Verdict::reject(wire::RejectReason::Replay);
        }
    }
    if (!mac::verify_mac(decode(chromosomes), request)) {
        return wire::Verdict::reject(wire::RejectReason::BadMac);
    }
    // Accepted nonces only; failed attempts must not burn fresh nonces.
    std::lock_guard lock(replay_mutex_);
    if (!replay_.record(request.client_id, request.nonce)) {
        return wire::Verdict::reject(wire::RejectReason::Replay);
    }
    return wire::Verdict::ok();
}

NVersionDatabase ServerCore::snapshot_db() const {
    std::shared_lock lock(db_mutex_);
    return db_;
}

}  // namespace nvo::server

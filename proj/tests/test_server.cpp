#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>

#include "nvo/client.hpp"
#include "nvo/codegen.hpp"
#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/mac.hpp"
#include "nvo/server.hpp"
#include "nvo/sha1.hpp"

using namespace nvo;
using namespace nvo::server;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = NVO_FIXTURES_DIR;
const fs::path kTemplates = NVO_TEMPLATES_DIR;

fs::path temp_dir() {
    const fs::path dir =
        fs::temp_directory_path() / ("nvo-server-test-" + std::to_string(os_entropy64()));
    fs::create_directories(dir);
    return dir;
}

std::vector<codegen::PoolEntry> gene_only_pool(std::size_t count, std::uint64_t seed) {
    std::vector<codegen::PoolEntry> pool;
    for (auto& pair : codegen::build_gene_pool(count, seed)) {
        pool.push_back(codegen::PoolEntry{std::move(pair), std::nullopt});
    }
    return pool;
}

mac::Nonce nonce_of(std::uint64_t tag) {
    mac::Nonce nonce{};
    for (std::size_t i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(tag >> (8 * i));
    return nonce;
}

}  // namespace

TEST_CASE("iso8601 timestamps round trip") {
    const std::time_t t = 1700000000;
    const std::string text = iso8601_utc(t);
    CHECK(text == "2023-11-14T22:13:20Z");
    CHECK(parse_iso8601_utc(text) == t);
    CHECK_THROWS_AS(parse_iso8601_utc("2023-11-14 22:13:20"), ParseError);
    CHECK_THROWS_AS(parse_iso8601_utc("not-a-time"), ParseError);
}

TEST_CASE("database save/load round trip") {
    const fs::path dir = temp_dir();
    NVersionDatabase db;
    db.backing_file = dir / "clients.db";
    SplitMix64 rng(31337);
    for (int i = 0; i < 3; ++i) {
        ClientRecord record;
        record.client_id = "client " + std::to_string(i);  // spaces allowed
        record.chromosomes = encode(random_genes(rng.next()));
        record.assigned_at = 1700000000 + i;
        db.records.push_back(record);
    }
    save_db(db);
    const NVersionDatabase loaded = load_db(db.backing_file);
    CHECK(loaded == db);

    SUBCASE("empty file loads as empty db") {
        std::ofstream(dir / "empty.db").close();
        CHECK(load_db(dir / "empty.db").records.empty());
    }

    SUBCASE("truncated record names its line") {
        std::ofstream out(dir / "bad.db");
        out << "client-a\t" << std::string(40, '0') << "\t" << std::string(40, '0')
            << "\t2023-11-14T22:13:20Z\n";
        out << "client-b\t" << std::string(40, '0') << "\n";
        out.close();
        try {
            load_db(dir / "bad.db");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }

    SUBCASE("duplicate ids are rejected") {
        std::ofstream out(dir / "dup.db");
        for (int i = 0; i < 2; ++i) {
            out << "same\t" << std::string(40, '0') << "\t" << std::string(40, '0')
                << "\t2023-11-14T22:13:20Z\n";
        }
        out.close();
        CHECK_THROWS_AS(load_db(dir / "dup.db"), ParseError);
    }

    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(load_db(dir / "nope.db"), IoError);
    }

    fs::remove_all(dir);
}

TEST_CASE("registration and lookup") {
    ServerConfig config;
    config.seed = 99;
    ServerCore core(config, gene_only_pool(4, 1));

    const auto reg = core.register_client("client-1");
    CHECK(reg.record.client_id == "client-1");
    CHECK(reg.variant_ref == codegen::PoolEntry::ref_name(reg.pool_index));
    CHECK(reg.delivery_token.size() == 32);

    CHECK(encode(core.lookup_genes("client-1")) == reg.record.chromosomes);
    CHECK_THROWS_AS(core.lookup_genes("client-2"), NotFoundError);
    CHECK_THROWS_AS(core.register_client("client-1"), AlreadyRegisteredError);
    CHECK_THROWS_AS(core.register_client("client\tbad"), EncodingError);
    CHECK_THROWS_AS(core.register_client(""), EncodingError);

    SUBCASE("empty pool cannot register") {
        ServerCore empty(ServerConfig{}, {});
        CHECK_THROWS_AS(empty.register_client("x"), PoolExhaustedError);
    }

    SUBCASE("reuse allowed by default, forbidden under unique assignment") {
        for (int i = 0; i < 10; ++i) {
            core.register_client("extra-" + std::to_string(i));  // 4-variant pool, reuse fine
        }

        ServerConfig unique;
        unique.unique_assignment = true;
        unique.seed = 5;
        ServerCore strict(unique, gene_only_pool(3, 2));
        std::set<std::string> assigned;
        for (int i = 0; i < 3; ++i) {
            const auto r = strict.register_client("u-" + std::to_string(i));
            assigned.insert(r.record.chromosomes.fp_chromosome.to_hex());
        }
        CHECK(assigned.size() == 3);
        CHECK_THROWS_AS(strict.register_client("u-overflow"), PoolExhaustedError);
    }
}

TEST_CASE("registration persists through the backing file") {
    const fs::path dir = temp_dir();
    ServerConfig config;
    config.db_path = dir / "clients.db";
    config.seed = 7;
    {
        ServerCore core(config, gene_only_pool(2, 3));
        core.register_client("persist-me");
    }
    CHECK(fs::exists(config.db_path));
    ServerCore reloaded(config, gene_only_pool(2, 3));
    CHECK_NOTHROW(reloaded.lookup_genes("persist-me"));
    fs::remove_all(dir);
}

TEST_CASE("handle_verify: verdict ladder") {
    ServerConfig config;
    config.seed = 11;
    config.replay_window = 4;
    ServerCore core(config, gene_only_pool(2, 21));
    core.register_client("alice");
    core.register_client("bob");

    const GeneVector alice = core.lookup_genes("alice");
    const GeneVector bob = core.lookup_genes("bob");
    const auto payload = to_bytes("transfer 10");

    SUBCASE("round trip accepted") {
        const auto request = mac::build_request(alice, "alice", nonce_of(1), payload);
        CHECK(core.handle_verify(request) == wire::Verdict::ok());
    }

    SUBCASE("unknown client") {
        const auto request = mac::build_request(alice, "mallory", nonce_of(2), payload);
        CHECK(core.handle_verify(request) ==
              wire::Verdict::reject(wire::RejectReason::UnknownClient));
    }

    SUBCASE("cross-gene rejection") {
        REQUIRE_FALSE(functionally_equivalent(alice, bob));
        const auto request = mac::build_request(alice, "bob", nonce_of(3), payload);
        CHECK(core.handle_verify(request) == wire::Verdict::reject(wire::RejectReason::BadMac));
    }

    SUBCASE("replay of an accepted nonce") {
        const auto request = mac::build_request(alice, "alice", nonce_of(4), payload);
        CHECK(core.handle_verify(request).accepted);
        CHECK(core.handle_verify(request) == wire::Verdict::reject(wire::RejectReason::Replay));
    }

    SUBCASE("failed attempts do not burn nonces") {
        const auto bad = mac::build_request(bob, "alice", nonce_of(5), payload);
        CHECK(core.handle_verify(bad) == wire::Verdict::reject(wire::RejectReason::BadMac));
        const auto good = mac::build_request(alice, "alice", nonce_of(5), payload);
        CHECK(core.handle_verify(good).accepted);
    }

    SUBCASE("window eviction forgets the oldest nonce") {
        for (std::uint64_t i = 0; i < 5; ++i) {  // window is 4
            CHECK(core.handle_verify(
                          mac::build_request(alice, "alice", nonce_of(100 + i), payload))
                      .accepted);
        }
        // nonce 100 fell out of the window; its replay is accepted again
        CHECK(core.handle_verify(mac::build_request(alice, "alice", nonce_of(100), payload))
                  .accepted);
        // nonce 104 is still inside
        CHECK(core.handle_verify(mac::build_request(alice, "alice", nonce_of(104), payload)) ==
              wire::Verdict::reject(wire::RejectReason::Replay));
    }
}

TEST_CASE("replay cache bounds per client") {
    ReplayCache cache(2);
    CHECK(cache.record("c", nonce_of(1)));
    CHECK_FALSE(cache.record("c", nonce_of(1)));
    CHECK(cache.record("c", nonce_of(2)));
    CHECK(cache.record("c", nonce_of(3)));          // evicts nonce 1
    CHECK_FALSE(cache.seen("c", nonce_of(1)));
    CHECK(cache.seen("c", nonce_of(3)));
    CHECK(cache.record("other", nonce_of(3)));      // per-client spaces
}

TEST_CASE("concurrent verifications against one snapshot") {
    ServerConfig config;
    config.seed = 13;
    ServerCore core(config, gene_only_pool(1, 8));
    core.register_client("solo");
    const GeneVector genes = core.lookup_genes("solo");
    const auto payload = to_bytes("ping");

    std::atomic<int> accepted{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < 8; ++t) {
        workers.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                const auto request = mac::build_request(
                    genes, "solo", nonce_of(0x1000u * (t + 1) + i), payload);
                if (core.handle_verify(request).accepted) ++accepted;
            }
        });
    }
    for (auto& w : workers) w.join();
    CHECK(accepted == 8 * 50);
}

TEST_CASE("http loopback: register, verify, reject") {
    ServerConfig config;
    config.seed = 1001;
    config.unique_assignment = true;
    ServerCore core(config,
                    codegen::variant_pool_build(2, 555, std::string(codegen::kDefaultTemplateId),
                                                kTemplates));
    HttpServer http(core);
    const int port = http.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread serving([&] { http.run(); });
    REQUIRE(http.wait_until_ready());

    const fs::path dir = temp_dir();

    client::ClientContext alice;
    alice.client_id = "alice";
    alice.server_host = "127.0.0.1";
    alice.server_port = port;

    const auto delivered = client::client_register(alice, dir / "alice-variant.cpp");
    CHECK_FALSE(delivered.variant_ref.empty());
    CHECK(delivered.delivery_token.size() == 32);
    CHECK(delivered.source_text.find("/* round 00 */") != std::string::npos);
    CHECK(fs::exists(dir / "alice-variant.cpp"));

    // duplicate registration surfaces as the protocol error
    client::ClientContext alice_again;
    alice_again.client_id = "alice";
    alice_again.server_port = port;
    CHECK_THROWS_AS(client::client_register(alice_again, dir / "dup.cpp"),
                    AlreadyRegisteredError);

    // The operator of this test owns the pool, so it can look the assigned
    // genes up by the returned reference (test mode embeds them).
    const std::size_t index = [&] {
        const std::string& ref = delivered.variant_ref;
        return std::stoul(ref.substr(ref.find('-') + 1));
    }();
    alice.backend = client::EmbeddedGenes{decode(core.pool()[index].chromosomes)};

    const auto payload = to_bytes("hello over http");
    CHECK(client::client_send(alice, payload) == wire::Verdict::ok());

    // a copied variant under another id fails: register bob, send with
    // alice's genes under bob's id
    client::ClientContext bob = alice;
    bob.client_id = "bob";
    bob.variant_source_path.reset();
    client::client_register(bob, dir / "bob-variant.cpp");
    CHECK(client::client_send(bob, payload) ==
          wire::Verdict::reject(wire::RejectReason::BadMac));

    // guard wiring: injected fixture aborts the send before any bytes leave
    client::ClientContext guarded = alice;
    guarded.guard.maps_source = kFixtures / "android_injected.maps";
    guarded.guard.dictionary = guard::load_dictionary(kFixtures / "android.dict");
    std::size_t reactions = 0;
    guarded.guard.reaction = [&](const guard::Violation&) { ++reactions; };
    CHECK_THROWS_AS(client::client_send(guarded, payload), GuardViolationError);
    CHECK(reactions == 1);

    // with the clean fixture the guard passes and the request goes out
    guarded.guard.maps_source = kFixtures / "android_clean.maps";
    CHECK(client::client_send(guarded, payload).accepted);

    // unreachable server surfaces as a network error
    client::ClientContext lost;
    lost.client_id = "nobody";
    lost.server_port = 1;  // nothing listens there
    CHECK_THROWS_AS(client::client_register(lost, dir / "lost.cpp"), NetworkError);

    http.stop();
    serving.join();
    fs::remove_all(dir);
}

#include "nvo/client.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/mac.hpp"

namespace nvo::client {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& text) {
    std::string out = "'";
    for (char c : text) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    out += "'";
    return out;
}

/// Feed the canonicalized request bytes to the variant executable and read
/// the 40-hex digest it prints.
Digest mac_via_executable(const fs::path& exe, std::span<const std::uint8_t> input) {
    std::array<std::uint8_t, 8> tag;
    fill_os_entropy(tag);
    const fs::path dir = fs::temp_directory_path() / ("nvo-send-" + hex_encode(tag));
    fs::create_directories(dir);
    const fs::path in = dir / "mac-input.bin";
    const fs::path out = dir / "mac-output.txt";
    {
        std::ofstream f(in, std::ios::binary);
        f.write(reinterpret_cast<const char*>(input.data()),
                static_cast<std::streamsize>(input.size()));
        if (!f) throw IoError("cannot stage MAC input under " + dir.string());
    }
    const std::string command = shell_quote(exe.string()) + " < " + shell_quote(in.string()) +
                                " > " + shell_quote(out.string());
    const int rc = std::system(command.c_str());
    std::string hex;
    if (rc == 0) {
        std::ifstream f(out, std::ios::binary);
        std::getline(f, hex);
    }
    fs::remove_all(dir);
    if (rc != 0) {
        throw Error("variant executable " + exe.string() + " exited nonzero");
    }
    return Digest::from_hex(hex);
}

json post_json(const ClientContext& ctx, const std::string& path, const json& body) {
    httplib::Client http(ctx.server_host, ctx.server_port);
    http.set_connection_timeout(5, 0);
    http.set_read_timeout(30, 0);
    const httplib::Result res = http.Post(path, body.dump(), "application/json");
    if (!res) {
        throw NetworkError("cannot reach " + ctx.server_host + ":" +
                           std::to_string(ctx.server_port) + " (" +
                           httplib::to_string(res.error()) + ")");
    }
    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const std::exception&) {
        throw NetworkError("non-JSON response from " + path + " (status " +
                           std::to_string(res->status) + ")");
    }
    if (res->status == 409) {
        throw AlreadyRegisteredError(parsed.value("detail", "client already registered"));
    }
    if (res->status != 200) {
        throw NetworkError(path + " failed with status " + std::to_string(res->status) + ": " +
                           parsed.value("detail", res->body));
    }
    return parsed;
}

}  // namespace

DeliveredVariant client_register(ClientContext& ctx, const fs::path& dest_path) {
    if (ctx.variant_source_path) {
        throw Error("context already holds a variant");
    }
    const json response = post_json(ctx, "/register", json{{"client_id", ctx.client_id}});

    DeliveredVariant delivered;
    delivered.variant_ref = response.value("variant_ref", "");
    delivered.delivery_token = response.value("delivery_token", "");
    delivered.source_text = response.value("variant_source", "");

    std::ofstream out(dest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot store variant at " + dest_path.string());
    out << delivered.source_text;
    if (!out) throw IoError("short write to " + dest_path.string());

    ctx.variant_source_path = dest_path;
    return delivered;
}

wire::Verdict client_send(ClientContext& ctx, std::span<const std::uint8_t> payload) {
    if (!ctx.backend) {
        throw Error("context has no MAC backend (embedded genes or variant executable)");
    }

    if (ctx.guard.maps_source) {
        const auto violations =
            guard::run_guard(*ctx.guard.maps_source, ctx.guard.dictionary, ctx.guard.reaction);
        if (!violations.empty() && ctx.guard.abort_on_violation) {
            throw GuardViolationError("send aborted: " +
                                          std::to_string(violations.size()) +
                                          " integrity violation(s)",
                                      violations.size());
        }
    }

    const mac::Nonce nonce = mac::random_nonce();
    Digest request_mac;
    if (const auto* embedded = std::get_if<EmbeddedGenes>(&*ctx.backend)) {
        request_mac = mac::compute_mac(embedded->genes, ctx.client_id, nonce, payload);
    } else {
        const auto& exe = std::get<VariantExecutable>(*ctx.backend);
        request_mac =
            mac_via_executable(exe.path, mac::canonicalize(ctx.client_id, nonce, payload));
    }

    const json body{{"client_id", ctx.client_id},
                    {"nonce", hex_encode(nonce)},
                    {"payload", base64_encode(payload)},
                    {"mac", request_mac.to_hex()}};
    const json response = post_json(ctx, "/verify", body);

    const std::string verdict_text = response.value("verdict", "");
    if (verdict_text == "accepted") return wire::Verdict::ok();
    if (verdict_text == "rejected") {
        const auto reason = wire::reason_from_string(response.value("reason", ""));
        if (reason) return wire::Verdict::reject(*reason);
        throw NetworkError("rejected with unknown reason: " + response.dump());
    }
    throw NetworkError("malformed verify response: " + response.dump());
}

}  // namespace nvo::client

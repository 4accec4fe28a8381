#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/server.hpp"

namespace nvo::server {

using json = nlohmann::json;

namespace {

json error_body(std::string_view code, std::string_view detail) {
    return json{{"error", std::string(code)}, {"detail", std::string(detail)}};
}

mac::MacRequest request_from_json(const json& body) {
    const auto nonce_hex = body.at("nonce").get<std::string>();
    if (nonce_hex.size() != 32) {
        throw ParseError("nonce must be 32 hex characters");
    }
    const auto nonce_bytes = hex_decode(nonce_hex);
    mac::Nonce nonce;
    std::copy(nonce_bytes.begin(), nonce_bytes.end(), nonce.begin());

    return mac::MacRequest::make(body.at("client_id").get<std::string>(), nonce,
                                 base64_decode(body.at("payload").get<std::string>()),
                                 Digest::from_hex(body.at("mac").get<std::string>()));
}

}  // namespace

struct HttpServer::Impl {
    ServerCore& core;
    httplib::Server http;
    std::atomic<int> port{0};

    explicit Impl(ServerCore& c) : core(c) {
        // SO_REUSEADDR only: a second server on the same port must fail to
        // bind instead of silently sharing the accept queue.
        http.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
                       sizeof(yes));
        });
        setup_routes();
    }

    void setup_routes() {
        http.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
                const auto client_id = body.at("client_id").get<std::string>();
                const ServerCore::Registration reg = core.register_client(client_id);
                json out{{"client_id", reg.record.client_id},
                         {"variant_ref", reg.variant_ref},
                         {"delivery_token", reg.delivery_token},
                         {"variant_source",
                          reg.variant->source ? reg.variant->source->source_text : ""}};
                res.status = 200;
                res.set_content(out.dump(), "application/json");
            } catch (const AlreadyRegisteredError& e) {
                res.status = 409;
                res.set_content(error_body("already-registered", e.what()).dump(),
                                "application/json");
            } catch (const PoolExhaustedError& e) {
                res.status = 503;
                res.set_content(error_body("pool-exhausted", e.what()).dump(),
                                "application/json");
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(error_body("bad-request", e.what()).dump(), "application/json");
            }
        });

        http.Post("/verify", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const mac::MacRequest request = request_from_json(json::parse(req.body));
                const wire::Verdict verdict = core.handle_verify(request);
                json out{{"verdict", verdict.accepted ? "accepted" : "rejected"}};
                if (verdict.reason) {
                    out["reason"] = std::string(wire::to_string(*verdict.reason));
                }
                res.status = 200;
                res.set_content(out.dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(error_body("bad-request", e.what()).dump(), "application/json");
            }
        });
    }
};

HttpServer::HttpServer(ServerCore& core) : impl_(std::make_unique<Impl>(core)) {}

HttpServer::~HttpServer() {
    stop();
}

bool HttpServer::bind(const std::string& host, int port) {
    if (!impl_->http.bind_to_port(host, port)) return false;
    impl_->port = port;
    return true;
}

int HttpServer::bind_any_port(const std::string& host) {
    const int port = impl_->http.bind_to_any_port(host);
    impl_->port = port;
    return port;
}

bool HttpServer::run() {
    return impl_->http.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_ && impl_->http.is_running()) {
        impl_->http.stop();
    }
}

bool HttpServer::wait_until_ready(int timeout_ms) const {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (!impl_->http.is_running()) {
        if (std::chrono::steady_clock::now() > deadline) return false;
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    return true;
}

}  // namespace nvo::server

// nvo: variant generation, the registration/verification server, the client
// side of the protocol, the memory-map guard, and the experiment harness in
// one binary.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvo/chromosome.hpp"
#include "nvo/client.hpp"
#include "nvo/codegen.hpp"
#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/guard.hpp"
#include "nvo/harness.hpp"
#include "nvo/mac.hpp"
#include "nvo/server.hpp"
#include "nvo/sha1.hpp"

namespace {

using namespace nvo;

std::vector<std::uint8_t> read_stream(std::istream& in) {
    std::vector<std::uint8_t> data;
    char chunk[4096];
    while (in.read(chunk, sizeof chunk) || in.gcount() > 0) {
        data.insert(data.end(), chunk, chunk + in.gcount());
    }
    return data;
}

std::vector<std::uint8_t> read_message(const std::string& path) {
    if (path.empty() || path == "-") {
        return read_stream(std::cin);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return read_stream(in);
}

struct GeneSelection {
    std::string fp_hex;
    std::string k_hex;
    std::optional<std::uint64_t> seed;
    bool canonical = false;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--fp-hex", fp_hex, "Round-function chromosome (40 hex chars)");
        cmd->add_option("--k-hex", k_hex, "Constant chromosome (40 hex chars)");
        cmd->add_option("--seed", seed, "Draw genes deterministically from this seed");
        cmd->add_flag("--canonical", canonical, "Use the standard-compatible genes");
    }

    GeneVector resolve() const {
        const bool have_hex = !fp_hex.empty() || !k_hex.empty();
        if (have_hex && (fp_hex.empty() || k_hex.empty())) {
            throw Error("--fp-hex and --k-hex must be given together");
        }
        if (have_hex) {
            return decode(ChromosomePair{Chromosome::from_hex(fp_hex),
                                         Chromosome::from_hex(k_hex)});
        }
        if (seed) return random_genes(*seed);
        if (canonical) return canonical_genes();
        return random_genes();
    }
};

std::pair<std::string, int> split_host_port(const std::string& address) {
    const std::size_t colon = address.rfind(':');
    if (colon == std::string::npos) {
        throw Error("expected host:port, got '" + address + "'");
    }
    const int port = std::stoi(address.substr(colon + 1));
    return {address.substr(0, colon), port};
}

guard::MapsSource maps_source_from(const std::string& maps_path, bool live) {
    if (live) return guard::LiveProcess{};
    if (maps_path.empty()) throw Error("give --maps <file> or --live");
    return std::filesystem::path(maps_path);
}

void print_report(const harness::ExperimentReport& report, const std::string& format) {
    if (format == "records") {
        std::cout << report.machine_records();
    } else {
        std::cout << report.human_text();
    }
}

int run(int argc, char** argv) {
    CLI::App app{"N-version SHA-1 diversification toolkit"};
    app.require_subcommand(1);

    // ---- digest ----
    auto* digest_cmd = app.add_subcommand("digest", "Digest a message with the parent engine");
    GeneSelection digest_genes;
    digest_genes.add_flags(digest_cmd);
    std::string digest_input;
    digest_cmd->add_option("--in", digest_input, "Message file (default: stdin)");

    // ---- render ----
    auto* render_cmd = app.add_subcommand("render", "Emit a hardcoded variant source");
    GeneSelection render_genes;
    render_genes.add_flags(render_cmd);
    std::string render_out;
    std::string render_template{codegen::kDefaultTemplateId};
    std::string templates_dir;
    render_cmd->add_option("--out", render_out, "Output file (default: stdout)");
    render_cmd->add_option("--template", render_template, "Template id");
    render_cmd->add_option("--templates", templates_dir, "Templates directory")
        ->envname("NVO_TEMPLATES");

    // ---- pool ----
    auto* pool_cmd = app.add_subcommand("pool", "Variant pool maintenance");
    pool_cmd->require_subcommand(1);
    auto* pool_build = pool_cmd->add_subcommand("build", "Render a pool of variants");
    std::size_t pool_count = 10;
    std::optional<std::uint64_t> pool_seed;
    std::string pool_dir;
    std::string pool_template{codegen::kDefaultTemplateId};
    std::string pool_templates_dir;
    pool_build->add_option("--count", pool_count, "Number of variants")->required();
    pool_build->add_option("--seed", pool_seed, "Deterministic pool seed");
    pool_build->add_option("--out", pool_dir, "Pool directory")->required();
    pool_build->add_option("--template", pool_template, "Template id");
    pool_build->add_option("--templates", pool_templates_dir, "Templates directory")
        ->envname("NVO_TEMPLATES");

    // ---- verify-variant ----
    auto* verify_cmd =
        app.add_subcommand("verify-variant", "Build a variant and check it against the engine");
    std::string verify_source;
    GeneSelection verify_genes;
    std::size_t verify_samples = 16;
    std::optional<std::uint64_t> verify_seed;
    verify_cmd->add_option("--source", verify_source, "Variant source file")->required();
    verify_genes.add_flags(verify_cmd);
    verify_cmd->add_option("--samples", verify_samples, "Random sample messages");
    verify_cmd->add_option("--sample-seed", verify_seed, "Seed for the sample messages");

    // ---- serve ----
    auto* serve_cmd = app.add_subcommand("serve", "Run the registration/verification server");
    std::string listen = "127.0.0.1:8077";
    std::string db_path;
    std::string serve_pool_dir;
    std::size_t replay_window = 1024;
    bool unique_assignment = false;
    serve_cmd->add_option("--listen", listen, "host:port")->envname("NVO_LISTEN");
    serve_cmd->add_option("--db", db_path, "Database file")->envname("NVO_DB")->required();
    serve_cmd->add_option("--pool", serve_pool_dir, "Pool directory")
        ->envname("NVO_POOL")
        ->required();
    serve_cmd->add_option("--replay-window", replay_window, "Nonces remembered per client")
        ->envname("NVO_REPLAY_WINDOW");
    serve_cmd->add_flag("--unique-assignment", unique_assignment,
                        "Assign each variant to at most one client")
        ->envname("NVO_UNIQUE_ASSIGNMENT");

    // ---- register ----
    auto* register_cmd = app.add_subcommand("register", "Obtain a variant from the server");
    std::string reg_server = "127.0.0.1:8077";
    std::string reg_id;
    std::string reg_out;
    register_cmd->add_option("--server", reg_server, "host:port");
    register_cmd->add_option("--id", reg_id, "Client identity")->required();
    register_cmd->add_option("--out", reg_out, "Where to store the delivered source")
        ->required();

    // ---- send ----
    auto* send_cmd = app.add_subcommand("send", "Send an authenticated request");
    std::string send_server = "127.0.0.1:8077";
    std::string send_id;
    std::string send_payload_path;
    std::string send_variant_exe;
    std::string send_fp_hex, send_k_hex;
    std::string send_maps;
    bool send_live_maps = false;
    std::string send_dict;
    bool send_no_abort = false;
    send_cmd->add_option("--server", send_server, "host:port");
    send_cmd->add_option("--id", send_id, "Client identity")->required();
    send_cmd->add_option("--payload", send_payload_path, "Payload file (default: stdin)");
    send_cmd->add_option("--variant", send_variant_exe, "Variant executable (delivered mode)");
    send_cmd->add_option("--genes-fp", send_fp_hex, "Embedded genes: fp chromosome hex");
    send_cmd->add_option("--genes-k", send_k_hex, "Embedded genes: k chromosome hex");
    send_cmd->add_option("--maps", send_maps, "Maps listing for the guard");
    send_cmd->add_flag("--live-maps", send_live_maps, "Guard the live process maps");
    send_cmd->add_option("--dict", send_dict, "Segment dictionary for the guard");
    send_cmd->add_flag("--no-abort", send_no_abort, "Report guard violations but still send");

    // ---- guard-scan ----
    auto* guard_cmd = app.add_subcommand("guard-scan", "Check a maps listing");
    std::string guard_maps;
    bool guard_live = false;
    std::string guard_dict;
    guard_cmd->add_option("--maps", guard_maps, "Maps listing file");
    guard_cmd->add_flag("--live", guard_live, "Check the calling process's own maps");
    guard_cmd->add_option("--dict", guard_dict, "Segment dictionary")->required();

    // ---- simulate ----
    auto* simulate_cmd = app.add_subcommand("simulate", "Run an experiment");
    simulate_cmd->require_subcommand(1);
    std::string sim_format = "text";

    auto* divergence_cmd =
        simulate_cmd->add_subcommand("divergence", "Digest collisions across variant pairs");
    std::size_t div_pairs = 1000;
    std::optional<std::uint64_t> div_seed;
    std::string div_message_path;
    divergence_cmd->add_option("--pairs", div_pairs, "Gene-vector pairs to draw");
    divergence_cmd->add_option("--seed", div_seed, "Experiment seed");
    divergence_cmd->add_option("--message", div_message_path, "Fixed message file");
    divergence_cmd->add_option("--format", sim_format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));

    auto* replication_cmd = simulate_cmd->add_subcommand(
        "replication", "Replay one compromised client against all others");
    std::size_t rep_clients = 10;
    std::optional<std::uint64_t> rep_seed;
    replication_cmd->add_option("--clients", rep_clients, "Simulated clients");
    replication_cmd->add_option("--seed", rep_seed, "Experiment seed");
    replication_cmd->add_option("--format", sim_format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));

    // ---- cost ----
    auto* cost_cmd = app.add_subcommand("cost", "Evaluate the linear tampering-cost model");
    harness::CostParameters cost_params;
    std::string cost_mode = "tamper-each";
    cost_cmd->add_option("--c0", cost_params.analyze_one_copy,
                         "Analyze+tamper one copy on the attacker's host")
        ->required();
    cost_cmd->add_option("--c1", cost_params.obtain_guard, "Obtain a target machine's guard")
        ->required();
    cost_cmd->add_option("--c2", cost_params.tamper_guard, "Tamper that guard");
    cost_cmd->add_option("--c3", cost_params.extract_genes, "Extract the genes of a guard");
    cost_cmd->add_option("--n", cost_params.machine_count, "Target machines")->required();
    cost_cmd->add_option("--mode", cost_mode, "tamper-each | gene-extraction")
        ->check(CLI::IsMember({"tamper-each", "gene-extraction"}));

    CLI11_PARSE(app, argc, argv);

    if (*digest_cmd) {
        const auto message = read_message(digest_input);
        std::cout << digest(digest_genes.resolve(), message).to_hex() << "\n";
        return 0;
    }

    if (*render_cmd) {
        const auto dir = templates_dir.empty() ? codegen::default_templates_dir()
                                               : std::filesystem::path(templates_dir);
        const auto variant =
            codegen::render_variant(render_genes.resolve(), render_template, dir);
        if (render_out.empty()) {
            std::cout << variant.source_text;
        } else {
            std::ofstream out(render_out, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + render_out);
            out << variant.source_text;
        }
        std::cerr << "fingerprint: " << variant.genes_fingerprint.to_hex() << "\n";
        return 0;
    }

    if (*pool_build) {
        const auto dir = pool_templates_dir.empty() ? codegen::default_templates_dir()
                                                    : std::filesystem::path(pool_templates_dir);
        const auto pool = codegen::variant_pool_build(pool_count, pool_seed, pool_template, dir);
        codegen::save_pool(pool_dir, pool);
        std::cout << "wrote " << pool.size() << " variants to " << pool_dir << "\n";
        return 0;
    }

    if (*verify_cmd) {
        std::ifstream in(verify_source, std::ios::binary);
        if (!in) throw IoError("cannot read " + verify_source);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const GeneVector genes = verify_genes.resolve();
        const codegen::VariantSource variant{buffer.str(),
                                             codegen::fingerprint(encode(genes)),
                                             std::string(codegen::kDefaultTemplateId)};
        SplitMix64 rng(verify_seed.value_or(os_entropy64()));
        std::vector<std::vector<std::uint8_t>> samples;
        for (std::size_t i = 0; i < verify_samples; ++i) {
            std::vector<std::uint8_t> sample(rng.next() % 512);
            for (auto& b : sample) b = static_cast<std::uint8_t>(rng.next());
            samples.push_back(std::move(sample));
        }
        const auto report = codegen::verify_generated(variant, genes, samples);
        std::cout << report.to_lines();
        return report.all_passed() ? 0 : 1;
    }

    if (*serve_cmd) {
        const auto [host, port] = split_host_port(listen);
        server::ServerConfig config;
        config.db_path = db_path;
        config.replay_window = replay_window;
        config.unique_assignment = unique_assignment;
        server::ServerCore core(config, codegen::load_pool(serve_pool_dir));
        server::HttpServer http(core);
        if (!http.bind(host, port)) {
            throw NetworkError("cannot bind " + listen);
        }
        std::cerr << "serving on " << listen << " (pool of " << core.pool().size()
                  << " variants)\n";
        return http.run() ? 0 : 1;
    }

    if (*register_cmd) {
        const auto [host, port] = split_host_port(reg_server);
        client::ClientContext ctx;
        ctx.client_id = reg_id;
        ctx.server_host = host;
        ctx.server_port = port;
        const auto delivered = client::client_register(ctx, reg_out);
        std::cout << "variant_ref: " << delivered.variant_ref << "\n"
                  << "delivery_token: " << delivered.delivery_token << "\n"
                  << "stored: " << reg_out << "\n";
        return 0;
    }

    if (*send_cmd) {
        const auto [host, port] = split_host_port(send_server);
        client::ClientContext ctx;
        ctx.client_id = send_id;
        ctx.server_host = host;
        ctx.server_port = port;

        const bool have_genes = !send_fp_hex.empty() || !send_k_hex.empty();
        if (have_genes && !send_variant_exe.empty()) {
            throw Error("--variant and --genes-fp/--genes-k are mutually exclusive");
        }
        if (have_genes) {
            ctx.backend = client::EmbeddedGenes{decode(
                ChromosomePair{Chromosome::from_hex(send_fp_hex),
                               Chromosome::from_hex(send_k_hex)})};
        } else if (!send_variant_exe.empty()) {
            ctx.backend = client::VariantExecutable{send_variant_exe};
        } else {
            throw Error("give --variant <exe> or --genes-fp/--genes-k");
        }

        if (!send_maps.empty() || send_live_maps) {
            ctx.guard.maps_source = maps_source_from(send_maps, send_live_maps);
            if (send_dict.empty()) throw Error("the guard needs --dict");
            ctx.guard.dictionary = guard::load_dictionary(send_dict);
            ctx.guard.abort_on_violation = !send_no_abort;
            ctx.guard.reaction = [](const guard::Violation& v) {
                std::cerr << "guard: " << v.describe() << "\n";
            };
        }

        const auto payload = read_message(send_payload_path);
        const wire::Verdict verdict = client::client_send(ctx, payload);
        std::cout << verdict.text() << "\n";
        return verdict.accepted ? 0 : 1;
    }

    if (*guard_cmd) {
        const auto source = maps_source_from(guard_maps, guard_live);
        const auto dict = guard::load_dictionary(guard_dict);
        const auto violations = guard::run_guard(source, dict, [](const guard::Violation& v) {
            std::cout << v.describe() << "\n";
        });
        if (violations.empty()) {
            std::cout << "intact\n";
            return 0;
        }
        std::cout << "violations: " << violations.size() << "\n";
        return 1;
    }

    if (*divergence_cmd) {
        const auto message = div_message_path.empty() ? to_bytes("divergence probe")
                                                      : read_message(div_message_path);
        print_report(harness::divergence_experiment(div_pairs, message, div_seed), sim_format);
        return 0;
    }

    if (*replication_cmd) {
        print_report(harness::replication_experiment(rep_clients, rep_seed), sim_format);
        return 0;
    }

    if (*cost_cmd) {
        const auto mode = cost_mode == "tamper-each" ? harness::CostMode::TamperEach
                                                     : harness::CostMode::GeneExtraction;
        std::printf("%.10g\n", harness::cost_total(cost_params, mode));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

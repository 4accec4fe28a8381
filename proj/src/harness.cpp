#include "nvo/harness.hpp"

#include <sstream>

#include "nvo/chromosome.hpp"
#include "nvo/codegen.hpp"
#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/mac.hpp"
#include "nvo/server.hpp"
#include "nvo/sha1.hpp"

namespace nvo::harness {

double cost_total(const CostParameters& p, CostMode mode) {
    const double per_machine =
        p.obtain_guard + (mode == CostMode::TamperEach ? p.tamper_guard : p.extract_genes);
    return p.analyze_one_copy + static_cast<double>(p.machine_count) * per_machine;
}

ExperimentReport tally(std::string scenario, std::vector<TrialOutcome> trials) {
    ExperimentReport report;
    report.scenario = std::move(scenario);
    report.trials = std::move(trials);
    report.summary["trials"] = report.trials.size();
    for (const TrialOutcome& trial : report.trials) {
        ++report.summary[trial.outcome];
    }
    return report;
}

std::string ExperimentReport::human_text() const {
    std::ostringstream out;
    out << "scenario: " << scenario << "\n";
    for (const auto& [key, value] : summary) {
        out << "  " << key << ": " << value << "\n";
    }
    return out.str();
}

std::string ExperimentReport::machine_records() const {
    std::ostringstream out;
    out << "scenario\t" << scenario << "\n";
    for (const TrialOutcome& trial : trials) {
        out << "trial\t" << trial.index << "\t" << trial.outcome;
        if (!trial.detail.empty()) out << "\t" << trial.detail;
        out << "\n";
    }
    for (const auto& [key, value] : summary) {
        out << "summary\t" << key << "\t" << value << "\n";
    }
    return out.str();
}

ExperimentReport divergence_experiment(const std::vector<GenePair>& pairs,
                                       std::span<const std::uint8_t> message) {
    std::vector<TrialOutcome> trials;
    trials.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [g1, g2] = pairs[i];
        TrialOutcome trial;
        trial.index = i;
        if (functionally_equivalent(g1, g2)) {
            // Equal by construction; kept out of the collision statistics.
            trial.outcome = "equivalent";
        } else {
            const Digest d1 = digest(g1, message);
            const Digest d2 = digest(g2, message);
            trial.outcome = (d1 == d2) ? "collision" : "diverged";
            if (d1 == d2) trial.detail = d1.to_hex();
        }
        trials.push_back(std::move(trial));
    }
    ExperimentReport report = tally("divergence", std::move(trials));
    report.summary["compared"] =
        report.summary["diverged"] + report.summary["collision"];
    report.summary.try_emplace("collision", 0);
    report.summary.try_emplace("equivalent", 0);
    return report;
}

ExperimentReport divergence_experiment(std::size_t pair_count,
                                       std::span<const std::uint8_t> message,
                                       std::optional<std::uint64_t> seed) {
    SplitMix64 stream(seed ? *seed : os_entropy64());
    std::vector<GenePair> pairs;
    pairs.reserve(pair_count);
    for (std::size_t i = 0; i < pair_count; ++i) {
        GeneVector g1 = random_genes(stream.next());
        GeneVector g2 = random_genes(stream.next());
        pairs.emplace_back(std::move(g1), std::move(g2));
    }
    return divergence_experiment(pairs, message);
}

ExperimentReport replication_experiment(std::size_t client_count,
                                        std::optional<std::uint64_t> seed) {
    if (client_count < 1) throw Error("replication experiment needs at least one client");
    SplitMix64 stream(seed ? *seed : os_entropy64());

    // Distinct variants per client: unique assignment over a pool of exactly
    // client_count pairwise non-equivalent gene vectors.
    std::vector<codegen::PoolEntry> pool;
    for (ChromosomePair& pair : codegen::build_gene_pool(client_count, stream.next())) {
        pool.push_back(codegen::PoolEntry{std::move(pair), std::nullopt});
    }
    server::ServerConfig config;
    config.unique_assignment = true;
    config.seed = stream.next();
    server::ServerCore core(std::move(config), std::move(pool));

    std::vector<std::string> client_ids;
    for (std::size_t i = 1; i <= client_count; ++i) {
        client_ids.push_back("client-" + std::to_string(i));
        core.register_client(client_ids.back());
    }

    // The attacker owns client 1 outright and replays its MAC capability
    // under every identity.
    const GeneVector stolen = core.lookup_genes(client_ids.front());
    const std::vector<std::uint8_t> payload = to_bytes("renew-license");

    std::vector<TrialOutcome> trials;
    for (std::size_t i = 0; i < client_count; ++i) {
        mac::Nonce nonce{};
        for (std::size_t b = 0; b < nonce.size(); b += 8) {
            const std::uint64_t word = stream.next();
            for (std::size_t j = 0; j < 8; ++j) {
                nonce[b + j] = static_cast<std::uint8_t>(word >> (8 * j));
            }
        }
        const mac::MacRequest request =
            mac::build_request(stolen, client_ids[i], nonce, payload);
        const wire::Verdict verdict = core.handle_verify(request);

        TrialOutcome trial;
        trial.index = i;
        trial.outcome = verdict.text();
        trial.detail = client_ids[i];
        trials.push_back(std::move(trial));
    }
    ExperimentReport report = tally("replication", std::move(trials));
    report.summary["clients"] = client_count;
    std::uint64_t rejected = 0;
    for (const auto& [key, value] : report.summary) {
        if (key.rfind("rejected", 0) == 0) rejected += value;
    }
    report.summary["rejected"] = rejected;
    report.summary.try_emplace("accepted", 0);
    return report;
}

}  // namespace nvo::harness

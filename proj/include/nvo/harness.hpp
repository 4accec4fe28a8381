#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nvo/genes.hpp"

namespace nvo::harness {

/// Attacker-effort parameters of the linear cost model. All values are
/// abstract time units supplied by the user.
struct CostParameters {
    double analyze_one_copy = 0;    // c0: analyze + tamper one copy on the attacker's host
    double obtain_guard = 0;        // c1: obtain a target machine's guard
    double tamper_guard = 0;        // c2: tamper that guard
    double extract_genes = 0;       // c3: recover the gene setting of a guard
    std::uint64_t machine_count = 0;  // n
};

enum class CostMode { TamperEach, GeneExtraction };

/// TamperEach: c0 + n*(c1+c2). GeneExtraction: c0 + n*(c1+c3).
double cost_total(const CostParameters& p, CostMode mode);

struct TrialOutcome {
    std::size_t index = 0;
    std::string outcome;  // scenario-specific label, e.g. "diverged"
    std::string detail;
};

/// Per-trial outcomes plus summary counts. The summary is tallied from the
/// trials, so the two can never disagree.
struct ExperimentReport {
    std::string scenario;
    std::vector<TrialOutcome> trials;
    std::map<std::string, std::uint64_t> summary;

    std::string human_text() const;
    std::string machine_records() const;  // "trial\t<i>\t<outcome>\t<detail>" / "summary\t<k>\t<v>" lines
};

ExperimentReport tally(std::string scenario, std::vector<TrialOutcome> trials);

using GenePair = std::pair<GeneVector, GeneVector>;

/// Compares digests of a fixed message across gene-vector pairs.
/// Functionally equivalent pairs are reported separately and excluded from
/// collision statistics. Outcomes: "equivalent", "diverged", "collision".
ExperimentReport divergence_experiment(const std::vector<GenePair>& pairs,
                                       std::span<const std::uint8_t> message);
ExperimentReport divergence_experiment(std::size_t pair_count,
                                       std::span<const std::uint8_t> message,
                                       std::optional<std::uint64_t> seed = std::nullopt);

/// In-process protocol run: client_count clients registered with distinct
/// variants, then an attacker holding client 1's genes presents MACs under
/// every client id. Outcomes: "accepted", "rejected(<reason>)".
ExperimentReport replication_experiment(std::size_t client_count,
                                        std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace nvo::harness

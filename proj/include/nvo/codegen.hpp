#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nvo/chromosome.hpp"
#include "nvo/digest.hpp"
#include "nvo/genes.hpp"

namespace nvo::codegen {

/// Rendered source of one child variant. The 80 round computations are
/// hardcoded in the text; no gene table survives into the program.
struct VariantSource {
    std::string source_text;
    Digest genes_fingerprint;  // see fingerprint()
    std::string template_id;
};

inline constexpr std::string_view kDefaultTemplateId = "standalone-cpp";

/// NVO_TEMPLATES environment variable when set, else "templates" relative to
/// the working directory.
std::filesystem::path default_templates_dir();

/// Identity of a chromosome pair for pool manifests and variant metadata:
/// the canonical-gene digest of the 40 raw chromosome bytes (fp then k).
/// Kept out of the generated source on purpose.
Digest fingerprint(const ChromosomePair& pair);

/// Renders genes into the named template. Deterministic: the same genes and
/// template give byte-identical text.
VariantSource render_variant(const GeneVector& genes,
                             const std::string& template_id = std::string(kDefaultTemplateId),
                             const std::filesystem::path& templates_dir = default_templates_dir());

struct VerifyReport {
    bool infrastructure_error = false;  // toolchain missing or build/run failed
    std::string infrastructure_detail;
    std::vector<bool> passes;           // one entry per sample message

    bool all_passed() const;
    std::string to_lines() const;       // "<message-index> PASS|FAIL" per line
};

/// True when a C++ compiler ($CXX, else "c++") answers --version.
bool toolchain_available();

/// Builds the variant in a scratch directory, runs it on every sample, and
/// compares each output with the parent engine's digest for the same genes.
/// Build or run failures surface as an infrastructure error, never as a
/// silent mismatch.
VerifyReport verify_generated(const VariantSource& variant, const GeneVector& genes,
                              const std::vector<std::vector<std::uint8_t>>& sample_messages);

/// Pairwise functionally-nonequivalent gene draws (regenerated on the
/// astronomically unlikely equivalence collision).
std::vector<ChromosomePair> build_gene_pool(std::size_t count,
                                            std::optional<std::uint64_t> seed = std::nullopt);

struct PoolEntry {
    ChromosomePair chromosomes;
    std::optional<VariantSource> source;  // absent for in-process pools

    /// File name a pool entry is stored and referenced under.
    static std::string ref_name(std::size_t index);
};

std::vector<PoolEntry> variant_pool_build(
    std::size_t count, std::optional<std::uint64_t> seed = std::nullopt,
    const std::string& template_id = std::string(kDefaultTemplateId),
    const std::filesystem::path& templates_dir = default_templates_dir());

/// Pool directory layout: manifest.tsv (index, fp hex, k hex, fingerprint,
/// source file) plus one source file per entry.
void save_pool(const std::filesystem::path& dir, const std::vector<PoolEntry>& pool);
std::vector<PoolEntry> load_pool(const std::filesystem::path& dir);

}  // namespace nvo::codegen

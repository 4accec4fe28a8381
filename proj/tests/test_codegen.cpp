#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nvo/codegen.hpp"
#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/sha1.hpp"
#include "reference_sha1.hpp"

using namespace nvo;
namespace cg = nvo::codegen;

namespace {

const std::filesystem::path kTemplates = NVO_TEMPLATES_DIR;

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t count = 0;
    for (std::size_t at = text.find(needle); at != std::string_view::npos;
         at = text.find(needle, at + needle.size())) {
        ++count;
    }
    return count;
}

cg::VariantSource render(const GeneVector& genes) {
    return cg::render_variant(genes, std::string(cg::kDefaultTemplateId), kTemplates);
}

}  // namespace

TEST_CASE("render_variant: canonical structure") {
    const cg::VariantSource v = render(canonical_genes());

    CHECK(count_occurrences(v.source_text, "/* round ") == 80);
    CHECK(count_occurrences(v.source_text, "0x5A827999") == 20);
    CHECK(count_occurrences(v.source_text, "0x6ED9EBA1") == 20);
    CHECK(count_occurrences(v.source_text, "0x8F1BBCDC") == 20);
    CHECK(count_occurrences(v.source_text, "0xCA62C1D6") == 20);

    // no runtime gene tables survive into the text
    CHECK(count_occurrences(v.source_text, "fp[") == 0);
    CHECK(count_occurrences(v.source_text, "genes") == 0);
    CHECK(count_occurrences(v.source_text, "{{") == 0);

    // rounds 0-19 carry the first constant, 60-79 the last
    const std::size_t round0 = v.source_text.find("/* round 00 */");
    const std::size_t round20 = v.source_text.find("/* round 20 */");
    const std::size_t round60 = v.source_text.find("/* round 60 */");
    REQUIRE(round0 != std::string::npos);
    const std::string_view first_phase(v.source_text.data() + round0, round20 - round0);
    CHECK(count_occurrences(first_phase, "0x5A827999") == 20);
    const std::string_view last_phase(v.source_text.data() + round60, 400);
    CHECK(last_phase.find("0xCA62C1D6") != std::string_view::npos);
}

TEST_CASE("render_variant: deterministic and gene-sensitive") {
    const GeneVector genes = random_genes(7);
    CHECK(render(genes).source_text == render(genes).source_text);
    CHECK(render(genes).source_text != render(random_genes(8)).source_text);
}

TEST_CASE("render_variant: all-K3 genes leave no trace of the other constants") {
    GeneVector genes = canonical_genes();
    genes.k.fill(KOptionId::K3);
    const cg::VariantSource v = render(genes);
    CHECK(count_occurrences(v.source_text, "0x5A827999") == 0);
    CHECK(count_occurrences(v.source_text, "0x6ED9EBA1") == 0);
    CHECK(count_occurrences(v.source_text, "0x8F1BBCDC") == 0);
    CHECK(count_occurrences(v.source_text, "0xCA62C1D6") == 80);
}

TEST_CASE("render_variant: unknown template") {
    CHECK_THROWS_AS(cg::render_variant(canonical_genes(), "no-such-template", kTemplates),
                    UnknownTemplateError);
}

TEST_CASE("fingerprint is the canonical digest of the chromosome bytes") {
    const ChromosomePair pair = encode(random_genes(99));
    std::vector<std::uint8_t> raw(pair.fp_chromosome.bits.begin(),
                                  pair.fp_chromosome.bits.end());
    raw.insert(raw.end(), pair.k_chromosome.bits.begin(), pair.k_chromosome.bits.end());
    CHECK(cg::fingerprint(pair).to_hex() == testref::sha1_hex(raw));
}

TEST_CASE("build_gene_pool: sized, seeded, pairwise non-equivalent") {
    CHECK(cg::build_gene_pool(1, 5).size() == 1);

    const auto a = cg::build_gene_pool(10, 1234);
    const auto b = cg::build_gene_pool(10, 1234);
    CHECK(a == b);

    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            CHECK_FALSE(functionally_equivalent(decode(a[i]), decode(a[j])));
        }
    }
}

TEST_CASE("pool save/load round trip") {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("nvo-pool-test-" + std::to_string(os_entropy64()));
    const auto pool = cg::variant_pool_build(3, 77, std::string(cg::kDefaultTemplateId),
                                             kTemplates);
    cg::save_pool(dir, pool);
    const auto loaded = cg::load_pool(dir);
    REQUIRE(loaded.size() == pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        CHECK(loaded[i].chromosomes == pool[i].chromosomes);
        REQUIRE(loaded[i].source.has_value());
        CHECK(loaded[i].source->source_text == pool[i].source->source_text);
        CHECK(loaded[i].source->genes_fingerprint == pool[i].source->genes_fingerprint);
    }
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(cg::load_pool(dir), IoError);
}

TEST_CASE("verify_generated" * doctest::skip(!cg::toolchain_available())) {
    const GeneVector canon = canonical_genes();
    const cg::VariantSource variant = render(canon);

    SUBCASE("canonical variant matches the engine and the oracle") {
        const std::vector<std::vector<std::uint8_t>> samples = {
            to_bytes("abc"), {}, to_bytes("The quick brown fox jumps over the lazy dog")};
        const cg::VerifyReport report = cg::verify_generated(variant, canon, samples);
        REQUIRE_FALSE(report.infrastructure_error);
        CHECK(report.all_passed());
        CHECK(report.to_lines() == "0 PASS\n1 PASS\n2 PASS\n");
    }

    SUBCASE("a patched constant is caught") {
        cg::VariantSource patched = variant;
        const std::size_t at = patched.source_text.find("0x5A827999");
        REQUIRE(at != std::string::npos);
        patched.source_text.replace(at, 10, "0x5A827998");
        const cg::VerifyReport report =
            cg::verify_generated(patched, canon, {to_bytes("abc"), to_bytes("xyz")});
        REQUIRE_FALSE(report.infrastructure_error);
        CHECK_FALSE(report.all_passed());
    }

    SUBCASE("build breakage is an infrastructure error, not a mismatch") {
        cg::VariantSource broken = variant;
        broken.source_text += "\nthis does not compile\n";
        const cg::VerifyReport report = cg::verify_generated(broken, canon, {to_bytes("abc")});
        CHECK(report.infrastructure_error);
        CHECK_FALSE(report.all_passed());
        CHECK(report.to_lines().rfind("ERROR", 0) == 0);
    }
}

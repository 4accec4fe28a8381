#include <doctest.h>

#include <set>

#include "nvo/chromosome.hpp"
#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/sha1.hpp"

using namespace nvo;

TEST_CASE("encode: canonical genes pack into the documented phases") {
    const ChromosomePair pair = encode(canonical_genes());
    const std::string expected = std::string(10, '0') + std::string(10, '5') +
                                 std::string(10, 'a') + std::string(10, 'f');
    CHECK(pair.fp_chromosome.to_hex() == expected);
    CHECK(pair.k_chromosome.to_hex() == expected);
}

TEST_CASE("encode: saturated gene values") {
    GeneVector all_zero;  // F0/K0 everywhere
    const ChromosomePair zeros = encode(all_zero);
    CHECK(zeros.fp_chromosome.to_hex() == std::string(40, '0'));
    CHECK(zeros.k_chromosome.to_hex() == std::string(40, '0'));

    GeneVector all_three;
    all_three.fp.fill(RoundFunctionId::F3);
    all_three.k.fill(KOptionId::K3);
    const ChromosomePair ones = encode(all_three);
    CHECK(ones.fp_chromosome.to_hex() == std::string(40, 'f'));
    CHECK(ones.k_chromosome.to_hex() == std::string(40, 'f'));
}

TEST_CASE("decode inverts encode") {
    CHECK(decode(ChromosomePair{}) == GeneVector{});  // all-zero pair -> all F0/K0

    SplitMix64 rng(0xbead);
    for (int trial = 0; trial < 50; ++trial) {
        const GeneVector g = random_genes(rng.next());
        CHECK(decode(encode(g)) == g);
    }
}

TEST_CASE("chromosome bit layout: gene i at bits 2i..2i+1, MSB first") {
    Chromosome c;
    c.set_code(0, 3);
    CHECK(c.bits[0] == 0xC0);
    CHECK(c.code_at(0) == 3);
    c.set_code(3, 1);
    CHECK(c.bits[0] == 0xC1);
    c.set_code(0, 0);
    CHECK(c.bits[0] == 0x01);
    c.set_code(79, 2);
    CHECK(c.bits[19] == 0x02);
    CHECK(c.code_at(79) == 2);
}

TEST_CASE("chromosome hex: canonical form and parse errors") {
    Chromosome zero;
    CHECK(zero.to_hex() == "0000000000000000000000000000000000000000");
    CHECK(Chromosome::from_hex(zero.to_hex()) == zero);

    SplitMix64 rng(0xf00d);
    for (int trial = 0; trial < 20; ++trial) {
        const Chromosome c = encode(random_genes(rng.next())).fp_chromosome;
        CHECK(Chromosome::from_hex(c.to_hex()) == c);
    }

    // lenient on input case, canonical lowercase out
    const Chromosome upper = Chromosome::from_hex(std::string(40, 'A'));
    CHECK(upper.to_hex() == std::string(40, 'a'));

    CHECK_THROWS_AS(Chromosome::from_hex(std::string(39, '0')), ParseError);
    CHECK_THROWS_AS(Chromosome::from_hex(std::string(41, '0')), ParseError);
    CHECK_THROWS_AS(Chromosome::from_hex("zz" + std::string(38, '0')), ParseError);
}

TEST_CASE("random_genes: seeded draws are reproducible and pinned") {
    const GeneVector a = random_genes(42);
    const GeneVector b = random_genes(42);
    CHECK(a == b);

    // Frozen stream values; a change here means seeded pools and experiments
    // stop being reproducible across releases.
    const ChromosomePair pair = encode(a);
    CHECK(pair.fp_chromosome.to_hex() == "78a46eb25c1517f6675091ebb43762aab26b89e3");
    CHECK(pair.k_chromosome.to_hex() == "53e8afc9ccb2b8c69527aa716c56a4a1e49ff19d");

    CHECK(random_genes(42) != random_genes(43));
    CHECK(random_genes() != random_genes());  // entropy path: 4^-160 collision odds
}

TEST_CASE("gene space is 2 bits per gene across two 160-bit chromosomes") {
    static_assert(GeneVector{}.fp.size() == 80);
    static_assert(GeneVector{}.k.size() == 80);
    static_assert(sizeof(Chromosome{}.bits) * 8 == 160);
    // 4^80 options per chromosome, two chromosomes: 2^320 pairs in total.
    CHECK(2 * 80 * 2 == 320);
}

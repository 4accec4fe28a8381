#include "nvo/codegen.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nvo/encoding.hpp"
#include "nvo/errors.hpp"
#include "nvo/sha1.hpp"

namespace nvo::codegen {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + path.string());
}

std::string_view formula_for(RoundFunctionId id) {
    switch (id) {
        case RoundFunctionId::F0: return "(b & c) | (~b & d)";
        case RoundFunctionId::F1: return "b ^ c ^ d";
        case RoundFunctionId::F2: return "(b & c) | (b & d) | (c & d)";
        case RoundFunctionId::F3: return "b ^ c ^ d";
    }
    return {};
}

std::string constant_literal(KOptionId id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", k_constant(id));
    return buf;
}

std::string render_round_steps(const GeneVector& genes) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kRoundCount; ++i) {
        char head[32];
        std::snprintf(head, sizeof head, "    /* round %02zu */\n", i);
        out << head;
        out << "    f = " << formula_for(genes.fp[i]) << ";\n";
        out << "    temp = rotl(a, 5) + f + e + " << constant_literal(genes.k[i]) << "u + w["
            << i << "];\n";
        out << "    e = d; d = c; c = rotl(b, 30); b = a; a = temp;\n";
    }
    return out.str();
}

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

int run_command(const std::string& command) {
    return std::system(command.c_str());
}

std::string compiler_command() {
    const char* cxx = std::getenv("CXX");
    return cxx && *cxx ? cxx : "c++";
}

fs::path make_scratch_dir() {
    std::array<std::uint8_t, 8> tag;
    fill_os_entropy(tag);
    fs::path dir = fs::temp_directory_path() / ("nvo-verify-" + hex_encode(tag));
    fs::create_directories(dir);
    return dir;
}

std::string trimmed(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
        text.pop_back();
    }
    return text;
}

}  // namespace

std::filesystem::path default_templates_dir() {
    const char* env = std::getenv("NVO_TEMPLATES");
    return env && *env ? fs::path(env) : fs::path("templates");
}

Digest fingerprint(const ChromosomePair& pair) {
    std::array<std::uint8_t, 40> raw;
    std::copy(pair.fp_chromosome.bits.begin(), pair.fp_chromosome.bits.end(), raw.begin());
    std::copy(pair.k_chromosome.bits.begin(), pair.k_chromosome.bits.end(), raw.begin() + 20);
    return nvo::digest(canonical_genes(), raw);
}

VariantSource render_variant(const GeneVector& genes, const std::string& template_id,
                             const fs::path& templates_dir) {
    const fs::path path = templates_dir / (template_id + ".tmpl");
    if (!fs::exists(path)) {
        throw UnknownTemplateError("no template '" + template_id + "' under " +
                                   templates_dir.string());
    }
    std::string text = read_file(path);

    constexpr std::string_view placeholder = "{{round_steps}}";
    const std::size_t at = text.find(placeholder);
    if (at == std::string::npos) {
        throw ParseError("template " + path.string() + " lacks the round_steps placeholder");
    }
    // The placeholder sits alone on its line; replace the whole line.
    std::size_t begin = text.rfind('\n', at);
    begin = (begin == std::string::npos) ? 0 : begin + 1;
    const std::size_t end = at + placeholder.size() + (text[at + placeholder.size()] == '\n');
    text = text.substr(0, begin) + render_round_steps(genes) + text.substr(end);

    return VariantSource{std::move(text), fingerprint(encode(genes)), template_id};
}

bool VerifyReport::all_passed() const {
    if (infrastructure_error || passes.empty()) return false;
    for (bool p : passes) {
        if (!p) return false;
    }
    return true;
}

std::string VerifyReport::to_lines() const {
    std::ostringstream out;
    if (infrastructure_error) {
        out << "ERROR " << infrastructure_detail << "\n";
        return out.str();
    }
    for (std::size_t i = 0; i < passes.size(); ++i) {
        out << i << (passes[i] ? " PASS" : " FAIL") << "\n";
    }
    return out.str();
}

bool toolchain_available() {
    static const bool available = [] {
        const std::string probe = compiler_command() + " --version >/dev/null 2>&1";
        return run_command(probe) == 0;
    }();
    return available;
}

VerifyReport verify_generated(const VariantSource& variant, const GeneVector& genes,
                              const std::vector<std::vector<std::uint8_t>>& sample_messages) {
    VerifyReport report;
    if (!toolchain_available()) {
        report.infrastructure_error = true;
        report.infrastructure_detail = "no C++ toolchain ('" + compiler_command() + "')";
        return report;
    }

    const fs::path dir = make_scratch_dir();
    const fs::path source = dir / "variant.cpp";
    const fs::path binary = dir / "variant";
    const fs::path build_log = dir / "build.log";

    write_file(source, variant.source_text);
    const std::string build = compiler_command() + " -std=c++17 -O1 -o " +
                              shell_quote(binary.string()) + " " + shell_quote(source.string()) +
                              " > " + shell_quote(build_log.string()) + " 2>&1";
    if (run_command(build) != 0) {
        report.infrastructure_error = true;
        report.infrastructure_detail = "build failed: " + trimmed(read_file(build_log));
        fs::remove_all(dir);
        return report;
    }

    for (std::size_t i = 0; i < sample_messages.size(); ++i) {
        const fs::path in = dir / ("msg-" + std::to_string(i) + ".bin");
        const fs::path out = dir / ("out-" + std::to_string(i) + ".txt");
        write_file(in, std::string_view(reinterpret_cast<const char*>(sample_messages[i].data()),
                                        sample_messages[i].size()));
        const std::string run = shell_quote(binary.string()) + " < " + shell_quote(in.string()) +
                                " > " + shell_quote(out.string());
        if (run_command(run) != 0) {
            report.infrastructure_error = true;
            report.infrastructure_detail = "variant exited nonzero on message " + std::to_string(i);
            fs::remove_all(dir);
            return report;
        }
        const std::string got = trimmed(read_file(out));
        const std::string expected = nvo::digest(genes, sample_messages[i]).to_hex();
        report.passes.push_back(got == expected);
    }

    fs::remove_all(dir);
    return report;
}

std::vector<ChromosomePair> build_gene_pool(std::size_t count,
                                            std::optional<std::uint64_t> seed) {
    SplitMix64 stream(seed ? *seed : os_entropy64());
    std::vector<GeneVector> genes;
    genes.reserve(count);
    while (genes.size() < count) {
        GeneVector candidate = random_genes(stream.next());
        bool clashes = false;
        for (const GeneVector& existing : genes) {
            if (functionally_equivalent(existing, candidate)) {
                clashes = true;
                break;
            }
        }
        if (!clashes) genes.push_back(candidate);
    }
    std::vector<ChromosomePair> pool;
    pool.reserve(count);
    for (const GeneVector& g : genes) pool.push_back(encode(g));
    return pool;
}

std::string PoolEntry::ref_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "variant-%03zu.cpp", index);
    return buf;
}

std::vector<PoolEntry> variant_pool_build(std::size_t count, std::optional<std::uint64_t> seed,
                                          const std::string& template_id,
                                          const fs::path& templates_dir) {
    std::vector<PoolEntry> pool;
    pool.reserve(count);
    for (ChromosomePair& pair : build_gene_pool(count, seed)) {
        VariantSource source = render_variant(decode(pair), template_id, templates_dir);
        pool.push_back(PoolEntry{std::move(pair), std::move(source)});
    }
    return pool;
}

void save_pool(const fs::path& dir, const std::vector<PoolEntry>& pool) {
    fs::create_directories(dir);
    std::ostringstream manifest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const PoolEntry& entry = pool[i];
        const std::string ref = PoolEntry::ref_name(i);
        manifest << i << '\t' << entry.chromosomes.fp_chromosome.to_hex() << '\t'
                 << entry.chromosomes.k_chromosome.to_hex() << '\t'
                 << (entry.source ? entry.source->genes_fingerprint.to_hex()
                                  : fingerprint(entry.chromosomes).to_hex())
                 << '\t' << ref << '\n';
        if (entry.source) {
            write_file(dir / ref, entry.source->source_text);
        }
    }
    write_file(dir / "manifest.tsv", manifest.str());
}

std::vector<PoolEntry> load_pool(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.tsv";
    if (!fs::exists(manifest_path)) {
        throw IoError("no pool manifest at " + manifest_path.string());
    }
    std::istringstream manifest(read_file(manifest_path));
    std::vector<PoolEntry> pool;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(manifest, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::array<std::string, 5> field;
        std::size_t start = 0;
        for (std::size_t f = 0; f < 5; ++f) {
            const std::size_t tab = line.find('\t', start);
            if (f < 4 && tab == std::string::npos) {
                throw ParseError("pool manifest record needs 5 fields", line_no);
            }
            field[f] = line.substr(start, tab == std::string::npos ? tab : tab - start);
            start = tab + 1;
        }
        PoolEntry entry;
        entry.chromosomes.fp_chromosome = Chromosome::from_hex(field[1]);
        entry.chromosomes.k_chromosome = Chromosome::from_hex(field[2]);
        const fs::path source_path = dir / field[4];
        if (fs::exists(source_path)) {
            entry.source = VariantSource{read_file(source_path), Digest::from_hex(field[3]),
                                         std::string(kDefaultTemplateId)};
        }
        pool.push_back(std::move(entry));
    }
    return pool;
}

}  // namespace nvo::codegen

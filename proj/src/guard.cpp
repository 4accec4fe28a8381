#include "nvo/guard.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nvo/errors.hpp"

namespace nvo::guard {

namespace fs = std::filesystem;

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view text, int base) {
    std::uint64_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::string_view next_token(std::string_view line, std::size_t& pos) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    return line.substr(start, pos - start);
}

struct RawMapping {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::string permissions;
    std::string pathname;
};

RawMapping parse_line(std::string_view line, std::size_t line_no) {
    std::size_t pos = 0;
    const std::string_view range = next_token(line, pos);
    const std::string_view perms = next_token(line, pos);
    const std::string_view offset = next_token(line, pos);
    const std::string_view dev = next_token(line, pos);
    const std::string_view inode = next_token(line, pos);
    if (inode.empty()) {
        throw ParseError("maps line has fewer than five fields", line_no);
    }

    const std::size_t dash = range.find('-');
    if (dash == std::string_view::npos) {
        throw ParseError("address range lacks '-'", line_no);
    }
    const auto start = parse_u64(range.substr(0, dash), 16);
    const auto end = parse_u64(range.substr(dash + 1), 16);
    if (!start || !end) {
        throw ParseError("bad address range '" + std::string(range) + "'", line_no);
    }
    if (*end < *start) {
        throw ParseError("segment end below start", line_no);
    }
    if (perms.size() != 4) {
        throw ParseError("permission flags must be 4 characters", line_no);
    }
    if (!parse_u64(offset, 16)) {
        throw ParseError("bad offset field", line_no);
    }
    if (dev.find(':') == std::string_view::npos) {
        throw ParseError("bad device field", line_no);
    }
    if (!parse_u64(inode, 10)) {
        throw ParseError("bad inode field", line_no);
    }

    // Everything after the inode, leading spaces stripped, is the pathname.
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::string_view pathname = line.substr(pos);
    while (!pathname.empty() && (pathname.back() == '\r' || pathname.back() == ' ')) {
        pathname.remove_suffix(1);
    }

    return RawMapping{*start, *end, std::string(perms), std::string(pathname)};
}

}  // namespace

bool is_anonymous(const SegmentRecord& record) {
    return record.name.empty() || record.name.front() == '[';
}

std::vector<SegmentRecord> parse_maps(std::string_view text) {
    std::vector<SegmentRecord> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty() || line == "\r") continue;

        const RawMapping mapping = parse_line(line, line_no);
        const std::uint64_t size = mapping.end - mapping.start;

        if (!mapping.pathname.empty()) {
            // Coalesce repeated pathnames (r-xp/r--p/rw-p sections of one
            // object) into a single record with the sizes summed.
            auto match = std::find_if(records.begin(), records.end(),
                                      [&](const SegmentRecord& r) {
                                          return r.name == mapping.pathname;
                                      });
            if (match != records.end()) {
                match->size += size;
                continue;
            }
        }
        records.push_back(SegmentRecord{mapping.pathname, size, mapping.permissions});
    }
    return records;
}

std::string Violation::describe() const {
    std::ostringstream out;
    if (kind == ViolationKind::UnknownSegment) {
        out << "unknown-segment " << segment.name << " (size " << segment.size << ")";
    } else {
        out << "size-mismatch " << segment.name << " (size " << segment.size << ", expected "
            << (expected_size ? std::to_string(*expected_size) : "?") << ")";
    }
    return out.str();
}

std::vector<Violation> integrity_check(const std::vector<SegmentRecord>& records,
                                       const SegmentDictionary& dict) {
    std::vector<Violation> violations;
    for (const SegmentRecord& record : records) {
        if (is_anonymous(record)) continue;
        const auto it = dict.entries.find(record.name);
        if (it == dict.entries.end()) {
            violations.push_back(Violation{ViolationKind::UnknownSegment, record, std::nullopt});
        } else if (it->second != record.size) {
            violations.push_back(Violation{ViolationKind::SizeMismatch, record, it->second});
        }
    }
    return violations;
}

SegmentDictionary load_dictionary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read dictionary " + path.string());
    SegmentDictionary dict;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("dictionary record needs <size> TAB <name>", line_no);
        }
        const auto size = parse_u64(std::string_view(line).substr(0, tab), 10);
        if (!size) {
            throw ParseError("bad size field '" + line.substr(0, tab) + "'", line_no);
        }
        std::string name = line.substr(tab + 1);
        if (name.empty()) {
            throw ParseError("empty segment name", line_no);
        }
        if (!dict.entries.emplace(std::move(name), *size).second) {
            throw ParseError("duplicate segment name", line_no);
        }
    }
    return dict;
}

void save_dictionary(const fs::path& path, const SegmentDictionary& dict) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write dictionary " + path.string());
    for (const auto& [name, size] : dict.entries) {
        out << size << '\t' << name << '\n';
    }
    if (!out) throw IoError("short write to " + path.string());
}

SegmentDictionary dictionary_from_records(const std::vector<SegmentRecord>& records) {
    SegmentDictionary dict;
    for (const SegmentRecord& record : records) {
        if (!is_anonymous(record)) dict.entries[record.name] = record.size;
    }
    return dict;
}

std::vector<Violation> run_guard(const MapsSource& source, const SegmentDictionary& dict,
                                 const Reaction& reaction) {
    std::string text;
    if (const auto* path = std::get_if<fs::path>(&source)) {
        std::ifstream in(*path, std::ios::binary);
        if (!in) throw IoError("cannot read maps listing " + path->string());
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    } else {
#if defined(__linux__)
        std::ifstream in("/proc/self/maps", std::ios::binary);
        if (!in) throw IoError("cannot read /proc/self/maps");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
#else
        throw UnsupportedPlatformError("no process maps listing on this platform");
#endif
    }

    std::vector<Violation> violations = integrity_check(parse_maps(text), dict);
    for (const Violation& violation : violations) {
        if (reaction) {
            reaction(violation);
        } else {
            std::cerr << "guard: " << violation.describe() << '\n';
        }
    }
    return violations;
}

}  // namespace nvo::guard

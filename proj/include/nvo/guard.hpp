#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nvo::guard {

/// One (possibly coalesced) mapping from a maps listing.
struct SegmentRecord {
    std::string name;           // pathname field; empty for anonymous mappings
    std::uint64_t size = 0;     // end - start, summed over coalesced mappings
    std::string permissions;    // 4-character flags of the first mapping seen

    friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

/// Mappings the checker ignores: no pathname, or a bracketed kernel
/// pseudo-entry such as [heap], [stack], [anon:...]. Their presence and size
/// are nondeterministic, so they cannot be whitelisted.
bool is_anonymous(const SegmentRecord& record);

/// Developer-defined whitelist: segment name -> expected coalesced size.
struct SegmentDictionary {
    std::map<std::string, std::uint64_t> entries;
};

enum class ViolationKind { UnknownSegment, SizeMismatch };

struct Violation {
    ViolationKind kind;
    SegmentRecord segment;
    std::optional<std::uint64_t> expected_size;  // present iff SizeMismatch

    std::string describe() const;
};

/// Parses a Linux `/proc/<pid>/maps` listing:
///   start-end perms offset dev inode [pathname]
/// Multiple mappings of one pathname coalesce into a single record with the
/// sizes summed; anonymous mappings stay as-is. Malformed lines raise a
/// ParseError naming the line.
std::vector<SegmentRecord> parse_maps(std::string_view text);

/// Name-and-size check against the dictionary. Anonymous records are
/// skipped; an empty result means intact.
std::vector<Violation> integrity_check(const std::vector<SegmentRecord>& records,
                                       const SegmentDictionary& dict);

/// Dictionary file: one `<size-in-bytes><TAB><name>` record per line, UTF-8,
/// names may contain spaces.
SegmentDictionary load_dictionary(const std::filesystem::path& path);
void save_dictionary(const std::filesystem::path& path, const SegmentDictionary& dict);

/// Build a dictionary that matches a record list exactly (named records
/// only). Convenience for fixture and deployment preparation.
SegmentDictionary dictionary_from_records(const std::vector<SegmentRecord>& records);

/// Where run_guard reads the maps listing from: a fixture file, or the
/// calling process's own maps when the platform exposes them.
struct LiveProcess {};
using MapsSource = std::variant<std::filesystem::path, LiveProcess>;

using Reaction = std::function<void(const Violation&)>;

/// Parse, check, invoke the reaction once per violation, return all
/// violations. An empty reaction falls back to a stderr log line. Unreadable
/// sources raise IoError; live mode raises UnsupportedPlatformError where
/// the process has no maps listing, never a silent pass.
std::vector<Violation> run_guard(const MapsSource& source, const SegmentDictionary& dict,
                                 const Reaction& reaction = {});

}  // namespace nvo::guard

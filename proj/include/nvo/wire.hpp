#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace nvo::wire {

enum class RejectReason { UnknownClient, Replay, BadMac };

std::string_view to_string(RejectReason reason);                       // "unknown-client" etc.
std::optional<RejectReason> reason_from_string(std::string_view text);

/// Outcome of a verify call. Failures are verdicts, not faults.
struct Verdict {
    bool accepted = false;
    std::optional<RejectReason> reason;

    static Verdict ok() { return {true, std::nullopt}; }
    static Verdict reject(RejectReason r) { return {false, r}; }

    std::string text() const;  // "accepted" or "rejected(<reason>)"

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

}  // namespace nvo::wire

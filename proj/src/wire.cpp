#include "nvo/wire.hpp"

namespace nvo::wire {

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::UnknownClient: return "unknown-client";
        case RejectReason::Replay: return "replay";
        case RejectReason::BadMac: return "bad-mac";
    }
    return "?";
}

std::optional<RejectReason> reason_from_string(std::string_view text) {
    if (text == "unknown-client") return RejectReason::UnknownClient;
    if (text == "replay") return RejectReason::Replay;
    if (text == "bad-mac") return RejectReason::BadMac;
    return std::nullopt;
}

std::string Verdict::text() const {
    if (accepted) return "accepted";
    return "rejected(" + std::string(reason ? to_string(*reason) : "?") + ")";
}

}  // namespace nvo::wire

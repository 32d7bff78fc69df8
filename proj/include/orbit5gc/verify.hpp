#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbit5gc/result.hpp"

namespace orbit5gc {

struct Violation {
    std::string invariant;
    std::vector<std::size_t> records;  // offending record indices (0-based line numbers)
    std::string detail;
};

struct VerifyReport {
    bool malformed = false;
    std::string malformed_reason;
    std::vector<Violation> violations;

    bool clean() const { return !malformed && violations.empty(); }
};

// Machine-checks the cross-module invariants over a JSONL trace:
// record-time ordering, link delay and FIFO discipline, contact-window
// gating, user-packet conservation against the final counters, UE/AMF
// state lag, SMF/UPF rule agreement, sessions only for registered
// subscribers, the 5-message registration exchange, and onboard offload
// isolation.
VerifyReport verify_trace(const std::string& jsonl);
VerifyReport verify_trace_file(const std::string& path);

}  // namespace orbit5gc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbit5gc/types.hpp"

namespace orbit5gc {

using TraceRecord = nlohmann::ordered_json;

// Run trace: one JSON record per line, first record kind "RunMeta", last
// kind "CountersFinal". Field names double as the trace schema; see
// docs/trace-format.md.
namespace kind {
inline constexpr const char* RunMeta = "RunMeta";
inline constexpr const char* NasSend = "NasSend";
inline constexpr const char* NasRecv = "NasRecv";
inline constexpr const char* LinkSend = "LinkSend";
inline constexpr const char* LinkQueue = "LinkQueue";
inline constexpr const char* LinkDeliver = "LinkDeliver";
inline constexpr const char* LinkDrop = "LinkDrop";
inline constexpr const char* RuleInstall = "RuleInstall";
inline constexpr const char* RuleRemove = "RuleRemove";
inline constexpr const char* UserPktSend = "UserPktSend";
inline constexpr const char* UserPktClassify = "UserPktClassify";
inline constexpr const char* UserPktDeliver = "UserPktDeliver";
inline constexpr const char* UserPktDrop = "UserPktDrop";
inline constexpr const char* UeState = "UeState";
inline constexpr const char* SessionState = "SessionState";
inline constexpr const char* ProcOutcome = "ProcOutcome";
inline constexpr const char* AmfError = "AmfError";
inline constexpr const char* CountersFinal = "CountersFinal";
}  // namespace kind

std::uint64_t fnv1a64(const std::string& data);

class Tracer {
public:
    // Starts a record with the fixed prefix fields (t_us, ev, kind).
    TraceRecord& append(TimeUs t, std::uint64_t event_seq, const char* kind) {
        records_.emplace_back();
        auto& r = records_.back();
        r["t_us"] = t;
        r["ev"] = event_seq;
        r["kind"] = kind;
        return r;
    }

    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::string serialize() const;          // JSONL
    std::uint64_t hash() const;             // FNV-1a over serialize()
    void write_file(const std::string& path) const;

private:
    std::vector<TraceRecord> records_;
};

std::string hash_hex(std::uint64_t h);

}  // namespace orbit5gc

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbit5gc/scenario.hpp"
#include "orbit5gc/trace.hpp"
#include "orbit5gc/upf.hpp"

namespace orbit5gc {

struct ProcedureResult {
    std::string proc;  // registration | session | release | deregister | traffic
    std::string supi;
    std::string outcome;  // ok | rejected | timeout | sent | no_session
    double latency_ms = 0.0;
    std::vector<double> exchanges_ms;  // registration request/response pairs
    std::string dn;
    std::string ue_ip;
    std::uint32_t session_id = 0;
    std::uint8_t cause = 0;
    int sent = 0, delivered = 0, dropped = 0;  // traffic
};

struct MetricsRow {
    double t_s = 0.0;
    std::uint64_t events_processed = 0;
    std::uint64_t bytes_up = 0, bytes_down = 0;
    std::size_t active_ues = 0, registered_ues = 0, active_sessions = 0;
    std::size_t context_bytes_estimate = 0;
    PacketCounters pkt;
};

std::string metrics_csv_header();
std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct RunResult {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string trace_text;
    std::uint64_t trace_hash = 0;
    std::size_t trace_records = 0;
    std::vector<MetricsRow> metrics;
    std::vector<ProcedureResult> procedures;
    PacketCounters counters;
    std::uint64_t events_processed = 0;
    std::uint64_t bytes_up = 0, bytes_down = 0;

    nlohmann::ordered_json summary() const;
};

// Executes the scenario's event loop to completion and returns the trace,
// per-second metrics series and per-procedure summary. Identical config
// and seed give a byte-identical trace. Runs are self-contained; several
// may execute on different threads concurrently.
RunResult run_scenario(const ScenarioConfig& cfg, std::optional<std::uint64_t> seed_override = {},
                       bool real_time = false);

}  // namespace orbit5gc

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbit5gc/ran.hpp"
#include "orbit5gc/satlink.hpp"
#include "orbit5gc/smf.hpp"
#include "orbit5gc/upf.hpp"

namespace orbit5gc {

// Configuration failure with the offending field's path, e.g.
// "$.ues[2].supi".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct GnbConfig {
    std::uint32_t id = 0;
    bool onboard = false;
};

struct UeRosterEntry {
    nas::Supi supi;
    std::vector<std::uint8_t> key;
    std::uint32_t gnb_id = 0;
    std::uint8_t slice_id = 0;
};

enum class ActionKind { Register, Session, Release, Deregister, Traffic };

struct TimelineAction {
    TimeUs at_us = 0;
    std::string ue_supi;
    ActionKind kind = ActionKind::Register;
    std::string dn;            // session/release
    std::uint8_t qos = 9;      // session
    std::uint32_t dst_ip = 0;  // traffic
    int count = 0;
    int size = 0;
    TimeUs interval_us = 0;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 1;
    TimeUs duration_us = 0;
    TimeUs metrics_cadence_us = 1'000'000;
    TimeUs processing_us = 500;
    TimeUs registration_timeout_us = 10'000'000;
    TimeUs auth_pending_timeout_us = 6'000'000;
    int ue_retries = 0;
    TimeUs retry_timeout_us = 1'000'000;

    LinkProfile link;
    std::vector<ContactWindow> windows;
    WindowPolicy window_policy = WindowPolicy::Queue;
    std::size_t window_queue_capacity = 1024;

    Ipv4Cidr ip_pool{0x0A2D0000u, 16};  // 10.45.0.0/16
    std::vector<DataNetworkConfig> data_networks;
    std::vector<ClassifierRule> classifier;
    std::vector<GnbConfig> gnbs;
    std::vector<UeRosterEntry> ues;
    std::vector<TimelineAction> timeline;
};

// Parse and validate; throws ScenarioError with a field-level diagnostic.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace orbit5gc

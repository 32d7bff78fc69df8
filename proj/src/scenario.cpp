#include "orbit5gc/scenario.hpp"

#include <fstream>
#include <set>

namespace orbit5gc {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError(path + "." + key, "missing required field");
    return *it;
}

double number_at(const json& obj, const std::string& key, const std::string& path, double def,
                 bool required = false) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) throw ScenarioError(path + "." + key, "missing required field");
        return def;
    }
    if (!it->is_number()) throw ScenarioError(path + "." + key, "expected a number");
    return it->get<double>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& path,
                      const std::string& def = "", bool required = false) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) throw ScenarioError(path + "." + key, "missing required field");
        return def;
    }
    if (!it->is_string()) throw ScenarioError(path + "." + key, "expected a string");
    return it->get<std::string>();
}

std::vector<std::uint8_t> parse_key_hex(const std::string& hex, const std::string& path) {
    if (hex.empty() || hex.size() % 2 != 0) throw ScenarioError(path, "key_hex must be nonempty even-length hex");
    auto bytes = nas::from_hex(hex);
    if (!bytes.ok()) throw ScenarioError(path, "key_hex contains non-hex characters");
    return bytes.take();
}

LinkProfile parse_link(const json& obj, const std::string& path) {
    LinkProfile p;
    p.one_way_delay_us = static_cast<TimeUs>(number_at(obj, "one_way_delay_us", path, 0.0, true));
    if (p.one_way_delay_us < 0) throw ScenarioError(path + ".one_way_delay_us", "must be >= 0");
    p.jitter_stddev_us = number_at(obj, "jitter_stddev_us", path, 0.0);
    if (p.jitter_stddev_us < 0) throw ScenarioError(path + ".jitter_stddev_us", "must be >= 0");
    p.loss_prob = number_at(obj, "loss_prob", path, 0.0);
    if (p.loss_prob < 0.0 || p.loss_prob > 1.0) throw ScenarioError(path + ".loss_prob", "must be in [0,1]");
    p.uplink_bps = number_at(obj, "uplink_bps", path, 0.0);
    p.downlink_bps = number_at(obj, "downlink_bps", path, 0.0);
    if (p.uplink_bps < 0 || p.downlink_bps < 0) throw ScenarioError(path, "bit rates must be >= 0");
    p.mtu = static_cast<int>(number_at(obj, "mtu", path, 1500.0));
    if (p.mtu < kTunnelHeaderBytes + 1) throw ScenarioError(path + ".mtu", "too small for tunnel overhead");
    p.reorder_allowed = obj.value("reorder_allowed", false);
    return p;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("$", "scenario must be a JSON object");
    ScenarioConfig cfg;
    cfg.name = string_at(doc, "name", "$", "", true);
    cfg.seed = static_cast<std::uint64_t>(number_at(doc, "seed", "$", 1.0));
    cfg.duration_us = seconds_us(number_at(doc, "duration_s", "$", 0.0, true));
    if (cfg.duration_us <= 0) throw ScenarioError("$.duration_s", "must be > 0");
    cfg.metrics_cadence_us = seconds_us(number_at(doc, "metrics_cadence_s", "$", 1.0));
    if (cfg.metrics_cadence_us <= 0) throw ScenarioError("$.metrics_cadence_s", "must be > 0");
    cfg.processing_us = static_cast<TimeUs>(number_at(doc, "processing_us", "$", 500.0));
    if (cfg.processing_us < 0) throw ScenarioError("$.processing_us", "must be >= 0");
    cfg.registration_timeout_us = seconds_us(number_at(doc, "registration_timeout_s", "$", 10.0));
    cfg.auth_pending_timeout_us = seconds_us(number_at(doc, "auth_pending_timeout_s", "$", 6.0));
    cfg.ue_retries = static_cast<int>(number_at(doc, "ue_retries", "$", 0.0));
    cfg.retry_timeout_us = seconds_us(number_at(doc, "retry_timeout_s", "$", 1.0));

    cfg.link = parse_link(require(doc, "satlink", "$"), "$.satlink");

    if (auto it = doc.find("contact_windows"); it != doc.end()) {
        if (!it->is_array()) throw ScenarioError("$.contact_windows", "expected an array");
        TimeUs prev_close = -1;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "$.contact_windows[" + std::to_string(i) + "]";
            const auto& w = (*it)[i];
            ContactWindow cw;
            cw.open_at = seconds_us(number_at(w, "open_s", path, 0.0, true));
            cw.close_at = seconds_us(number_at(w, "close_s", path, 0.0, true));
            if (cw.open_at >= cw.close_at) throw ScenarioError(path, "open_s must be < close_s");
            if (cw.open_at <= prev_close) throw ScenarioError(path, "windows must be sorted and disjoint");
            prev_close = cw.close_at;
            cfg.windows.push_back(cw);
        }
    }
    const std::string policy = string_at(doc, "window_policy", "$", "queue");
    if (policy == "queue")
        cfg.window_policy = WindowPolicy::Queue;
    else if (policy == "drop")
        cfg.window_policy = WindowPolicy::Drop;
    else
        throw ScenarioError("$.window_policy", "must be \"queue\" or \"drop\"");
    cfg.window_queue_capacity =
        static_cast<std::size_t>(number_at(doc, "window_queue_capacity", "$", 1024.0));

    if (auto pool = string_at(doc, "ip_pool", "$", "10.45.0.0/16"); true) {
        auto cidr = parse_cidr(pool);
        if (!cidr.ok()) throw ScenarioError("$.ip_pool", "invalid CIDR: " + pool);
        cfg.ip_pool = cidr.value();
    }

    const auto& dns = require(doc, "data_networks", "$");
    if (!dns.is_array() || dns.empty()) throw ScenarioError("$.data_networks", "need at least one data network");
    std::set<std::string> dn_names;
    for (std::size_t i = 0; i < dns.size(); ++i) {
        const std::string path = "$.data_networks[" + std::to_string(i) + "]";
        DataNetworkConfig dn;
        dn.name = string_at(dns[i], "name", path, "", true);
        const std::string target = string_at(dns[i], "target", path, "", true);
        if (target == "onboard")
            dn.target = DnTarget::Onboard;
        else if (target == "ground")
            dn.target = DnTarget::Ground;
        else
            throw ScenarioError(path + ".target", "must be \"onboard\" or \"ground\"");
        dn.echo = dns[i].value("echo", false);
        if (!dn_names.insert(dn.name).second) throw ScenarioError(path + ".name", "duplicate data network");
        cfg.data_networks.push_back(dn);
    }

    const auto& cls = require(doc, "classifier", "$");
    if (!cls.is_array()) throw ScenarioError("$.classifier", "expected an array");
    bool has_catch_all = false;
    std::set<std::pair<std::uint32_t, int>> seen_prefixes;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        const std::string path = "$.classifier[" + std::to_string(i) + "]";
        ClassifierRule rule;
        const std::string prefix = string_at(cls[i], "prefix", path, "", true);
        auto cidr = parse_cidr(prefix);
        if (!cidr.ok()) throw ScenarioError(path + ".prefix", "invalid CIDR: " + prefix);
        rule.dst_prefix = cidr.value();
        const std::string target = string_at(cls[i], "target", path, "", true);
        if (target == "onboard")
            rule.dn_target = DnTarget::Onboard;
        else if (target == "ground")
            rule.dn_target = DnTarget::Ground;
        else
            throw ScenarioError(path + ".target", "must be \"onboard\" or \"ground\"");
        if (!seen_prefixes.insert({rule.dst_prefix.base, rule.dst_prefix.prefix_len}).second)
            throw ScenarioError(path + ".prefix", "duplicate classifier prefix");
        if (rule.dst_prefix.prefix_len == 0 && rule.dn_target == DnTarget::Ground) has_catch_all = true;
        cfg.classifier.push_back(rule);
    }
    if (!has_catch_all)
        throw ScenarioError("$.classifier", "must contain the 0.0.0.0/0 -> ground catch-all rule");

    const auto& gnbs = require(doc, "gnbs", "$");
    if (!gnbs.is_array() || gnbs.empty()) throw ScenarioError("$.gnbs", "need at least one gNB");
    std::set<std::uint32_t> gnb_ids;
    for (std::size_t i = 0; i < gnbs.size(); ++i) {
        const std::string path = "$.gnbs[" + std::to_string(i) + "]";
        GnbConfig g;
        g.id = static_cast<std::uint32_t>(number_at(gnbs[i], "id", path, 0.0, true));
        const std::string loc = string_at(gnbs[i], "location", path, "ground");
        if (loc == "ground")
            g.onboard = false;
        else if (loc == "onboard")
            g.onboard = true;
        else
            throw ScenarioError(path + ".location", "must be \"ground\" or \"onboard\"");
        if (!gnb_ids.insert(g.id).second) throw ScenarioError(path + ".id", "duplicate gNB id");
        cfg.gnbs.push_back(g);
    }

    const auto& ues = require(doc, "ues", "$");
    if (!ues.is_array()) throw ScenarioError("$.ues", "expected an array");
    std::set<std::string> supis;
    for (std::size_t i = 0; i < ues.size(); ++i) {
        const std::string path = "$.ues[" + std::to_string(i) + "]";
        UeRosterEntry ue;
        const std::string supi_str = string_at(ues[i], "supi", path, "", true);
        auto supi = nas::Supi::parse(supi_str);
        if (!supi.ok()) throw ScenarioError(path + ".supi", "must be exactly 15 decimal digits");
        ue.supi = supi.value();
        ue.key = parse_key_hex(string_at(ues[i], "key_hex", path, "", true), path + ".key_hex");
        ue.gnb_id = static_cast<std::uint32_t>(number_at(ues[i], "gnb", path, 0.0, true));
        if (!gnb_ids.count(ue.gnb_id)) throw ScenarioError(path + ".gnb", "references an unknown gNB id");
        ue.slice_id = static_cast<std::uint8_t>(number_at(ues[i], "slice_id", path, 0.0));
        if (!supis.insert(supi_str).second) throw ScenarioError(path + ".supi", "duplicate SUPI");
        cfg.ues.push_back(ue);
    }

    if (auto it = doc.find("timeline"); it != doc.end()) {
        if (!it->is_array()) throw ScenarioError("$.timeline", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "$.timeline[" + std::to_string(i) + "]";
            const auto& a = (*it)[i];
            TimelineAction act;
            act.at_us = seconds_us(number_at(a, "at_s", path, 0.0, true));
            if (act.at_us < 0 || act.at_us > cfg.duration_us)
                throw ScenarioError(path + ".at_s", "timestamp outside scenario duration");
            act.ue_supi = string_at(a, "ue", path, "", true);
            if (!supis.count(act.ue_supi)) throw ScenarioError(path + ".ue", "references an unknown UE");
            const std::string action = string_at(a, "action", path, "", true);
            if (action == "register") {
                act.kind = ActionKind::Register;
            } else if (action == "session") {
                act.kind = ActionKind::Session;
                act.dn = string_at(a, "dn", path, "", true);
                act.qos = static_cast<std::uint8_t>(number_at(a, "qos", path, 9.0));
            } else if (action == "release") {
                act.kind = ActionKind::Release;
                act.dn = string_at(a, "dn", path, "", true);
            } else if (action == "deregister") {
                act.kind = ActionKind::Deregister;
            } else if (action == "traffic") {
                act.kind = ActionKind::Traffic;
                act.dn = string_at(a, "dn", path, "");
                const std::string dst = string_at(a, "dst", path, "", true);
                auto ip = parse_ipv4(dst);
                if (!ip.ok()) throw ScenarioError(path + ".dst", "invalid IPv4 address: " + dst);
                act.dst_ip = ip.value();
                act.count = static_cast<int>(number_at(a, "count", path, 1.0));
                if (act.count <= 0) throw ScenarioError(path + ".count", "must be > 0");
                act.size = static_cast<int>(number_at(a, "size", path, 0.0, true));
                if (act.size <= 0 || act.size > cfg.link.mtu - kTunnelHeaderBytes)
                    throw ScenarioError(path + ".size",
                                        "payload must be in [1, mtu - " +
                                            std::to_string(kTunnelHeaderBytes) + "]");
                act.interval_us = static_cast<TimeUs>(number_at(a, "interval_us", path, 1000.0));
                if (act.interval_us < 0) throw ScenarioError(path + ".interval_us", "must be >= 0");
            } else {
                throw ScenarioError(path + ".action", "unknown action: " + action);
            }
            cfg.timeline.push_back(act);
        }
    }
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("$", "cannot open scenario file: " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ScenarioError("$", std::string("JSON parse error: ") + e.what());
    }
    auto cfg = parse_scenario(doc);
    return cfg;
}

}  // namespace orbit5gc

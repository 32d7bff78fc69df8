#include "orbit5gc/upf.hpp"

namespace orbit5gc {

const char* upf_error_name(UpfError e) {
    switch (e) {
        case UpfError::Ok: return "Ok";
        case UpfError::DuplicateRule: return "DuplicateRule";
        case UpfError::UnknownRule: return "UnknownRule";
        case UpfError::NoSession: return "NoSession";
        case UpfError::OversizePacket: return "OversizePacket";
        case UpfError::DuplicatePrefix: return "DuplicatePrefix";
        case UpfError::MissingCatchAll: return "MissingCatchAll";
        case UpfError::BadN4Message: return "BadN4Message";
    }
    return "?";
}

std::vector<std::uint8_t> encode_tunnel_header(std::uint32_t tunnel_id, std::uint16_t payload_len,
                                               std::uint32_t sequence) {
    std::vector<std::uint8_t> h(kTunnelHeaderBytes, 0);
    h[0] = 0x30;  // version 1, sequence present
    h[1] = 0xFF;  // encapsulated user data
    h[2] = static_cast<std::uint8_t>(payload_len >> 8);
    h[3] = static_cast<std::uint8_t>(payload_len & 0xFF);
    for (int i = 0; i < 4; ++i) h[4 + i] = static_cast<std::uint8_t>(tunnel_id >> (24 - 8 * i));
    for (int i = 0; i < 4; ++i) h[8 + i] = static_cast<std::uint8_t>(sequence >> (24 - 8 * i));
    return h;
}

std::vector<std::uint8_t> encode_n4(bool install, const ForwardingRule& rule, std::uint8_t dn_index) {
    std::vector<std::uint8_t> m;
    m.reserve(kN4MessageBytes);
    m.push_back(install ? 1 : 2);
    for (std::uint32_t v : {rule.session_id, rule.tunnel_id, rule.ue_ip})
        for (int i = 0; i < 4; ++i) m.push_back(static_cast<std::uint8_t>(v >> (24 - 8 * i)));
    m.push_back(dn_index);
    return m;
}

Upf::Upf(Simulator& sim, Tracer& tracer, int mtu) : sim_(sim), tracer_(tracer), mtu_(mtu) {}

UpfError Upf::install_classifier(const ClassifierRule& rule) {
    for (const auto& r : classifier_)
        if (r.dst_prefix.base == rule.dst_prefix.base && r.dst_prefix.prefix_len == rule.dst_prefix.prefix_len)
            return UpfError::DuplicatePrefix;
    classifier_.push_back(rule);
    return UpfError::Ok;
}

UpfError Upf::finalize_classifier() const {
    for (const auto& r : classifier_)
        if (r.dst_prefix.prefix_len == 0 && r.dn_target == DnTarget::Ground) return UpfError::Ok;
    return UpfError::MissingCatchAll;
}

UpfError Upf::handle_n4(std::span<const std::uint8_t> msg) {
    if (msg.size() != kN4MessageBytes) return UpfError::BadN4Message;
    if (msg[0] != 1 && msg[0] != 2) return UpfError::BadN4Message;
    auto u32_at = [&](std::size_t off) {
        return (static_cast<std::uint32_t>(msg[off]) << 24) | (static_cast<std::uint32_t>(msg[off + 1]) << 16) |
               (static_cast<std::uint32_t>(msg[off + 2]) << 8) | msg[off + 3];
    };
    ForwardingRule rule;
    rule.session_id = u32_at(1);
    rule.tunnel_id = u32_at(5);
    rule.ue_ip = u32_at(9);
    const std::uint8_t dn_index = msg[13];
    if (msg[0] == 2) return remove_rule(rule.session_id);
    if (dn_index >= dn_table_.size()) return UpfError::BadN4Message;
    rule.dn_target = dn_table_[dn_index];
    return install_rule(rule);
}

UpfError Upf::install_rule(const ForwardingRule& rule) {
    if (rules_.count(rule.session_id)) return UpfError::DuplicateRule;
    for (const auto& [id, r] : rules_)
        if (r.ue_ip == rule.ue_ip || r.tunnel_id == rule.tunnel_id) return UpfError::DuplicateRule;
    rules_[rule.session_id] = rule;
    trace_rule(kind::RuleInstall, rule);
    return UpfError::Ok;
}

UpfError Upf::remove_rule(std::uint32_t session_id) {
    auto it = rules_.find(session_id);
    if (it == rules_.end()) return UpfError::UnknownRule;
    trace_rule(kind::RuleRemove, it->second);
    rules_.erase(it);
    return UpfError::Ok;
}

std::vector<std::uint32_t> Upf::rule_session_ids() const {
    std::vector<std::uint32_t> ids;
    ids.reserve(rules_.size());
    for (const auto& [id, r] : rules_) ids.push_back(id);
    return ids;
}

void Upf::trace_rule(const char* kind, const ForwardingRule& rule) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind);
    rec["src"] = "smf";
    rec["dst"] = "upf";
    rec["size"] = kN4MessageBytes;
    rec["session_id"] = rule.session_id;
    rec["tunnel_id"] = rule.tunnel_id;
    rec["ue_ip"] = format_ipv4(rule.ue_ip);
    rec["dn"] = dn_target_name(rule.dn_target);
}

Result<DnTarget, UpfError> Upf::classify_uplink(const UserPacket& pkt) const {
    bool found = false;
    for (const auto& [id, r] : rules_)
        if (r.tunnel_id == pkt.tunnel_id) { found = true; break; }
    if (!found) return UpfError::NoSession;

    int best_len = -1;
    DnTarget best = DnTarget::Ground;
    for (const auto& r : classifier_) {
        if (r.dst_prefix.contains(pkt.dst_ip) && r.dst_prefix.prefix_len > best_len) {
            best_len = r.dst_prefix.prefix_len;
            best = r.dn_target;
        }
    }
    if (best_len < 0) return UpfError::NoSession;  // unreachable once catch-all is enforced
    return best;
}

Result<std::pair<std::uint32_t, int>, UpfError> Upf::lookup_downlink(const UserPacket& pkt) const {
    if (pkt.payload_len > mtu_ - kTunnelHeaderBytes) return UpfError::OversizePacket;
    for (const auto& [id, r] : rules_)
        if (r.ue_ip == pkt.dst_ip) return std::make_pair(r.tunnel_id, pkt.payload_len + kTunnelHeaderBytes);
    return UpfError::NoSession;
}

void Upf::uplink_sent(const UserPacket& pkt) {
    counters_.in_uplink++;
    counters_.bytes_in_uplink += pkt.payload_len;
    counters_.in_flight++;
    counters_.bytes_in_flight += pkt.payload_len;
}

void Upf::uplink_link_dropped(const UserPacket& pkt) {
    counters_.dropped_link++;
    counters_.bytes_dropped_link += pkt.payload_len;
    counters_.in_flight--;
    counters_.bytes_in_flight -= pkt.payload_len;
    trace_pkt_drop(pkt, "link");
}

Result<DnTarget, UpfError> Upf::uplink_arrived(const UserPacket& pkt) {
    auto target = classify_uplink(pkt);
    if (!target.ok()) {
        counters_.dropped_no_rule++;
        counters_.bytes_dropped_no_rule += pkt.payload_len;
        counters_.in_flight--;
        counters_.bytes_in_flight -= pkt.payload_len;
        trace_pkt_drop(pkt, "no_rule");
        return target;
    }
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktClassify);
    rec["pkt_id"] = pkt.pkt_id;
    rec["dst_ip"] = format_ipv4(pkt.dst_ip);
    rec["dn"] = dn_target_name(target.value());
    if (target.value() == DnTarget::Onboard) {
        counters_.delivered_onboard++;
        counters_.bytes_delivered_onboard += pkt.payload_len;
        counters_.in_flight--;
        counters_.bytes_in_flight -= pkt.payload_len;
        auto& d = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktDeliver);
        d["pkt_id"] = pkt.pkt_id;
        d["where"] = "onboard";
        d["size"] = pkt.payload_len;
    }
    return target;
}

void Upf::ground_leg_delivered(const UserPacket& pkt) {
    counters_.delivered_ground++;
    counters_.bytes_delivered_ground += pkt.payload_len;
    counters_.in_flight--;
    counters_.bytes_in_flight -= pkt.payload_len;
    auto& d = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktDeliver);
    d["pkt_id"] = pkt.pkt_id;
    d["where"] = "ground";
    d["size"] = pkt.payload_len;
}

void Upf::ground_leg_dropped(const UserPacket& pkt) {
    counters_.dropped_link++;
    counters_.bytes_dropped_link += pkt.payload_len;
    counters_.in_flight--;
    counters_.bytes_in_flight -= pkt.payload_len;
    trace_pkt_drop(pkt, "link");
}

UpfError Upf::downlink_sent(const UserPacket& pkt) {
    if (pkt.payload_len > mtu_ - kTunnelHeaderBytes) return UpfError::OversizePacket;
    counters_.in_downlink++;
    counters_.bytes_in_downlink += pkt.payload_len;
    counters_.in_flight++;
    counters_.bytes_in_flight += pkt.payload_len;
    return UpfError::Ok;
}

void Upf::downlink_link_dropped(const UserPacket& pkt) {
    counters_.dropped_link++;
    counters_.bytes_dropped_link += pkt.payload_len;
    counters_.in_flight--;
    counters_.bytes_in_flight -= pkt.payload_len;
    trace_pkt_drop(pkt, "link");
}

Result<std::pair<std::uint32_t, int>, UpfError> Upf::downlink_arrived(const UserPacket& pkt) {
    auto hit = lookup_downlink(pkt);
    if (!hit.ok()) {
        counters_.dropped_no_rule++;
        counters_.bytes_dropped_no_rule += pkt.payload_len;
        counters_.in_flight--;
        counters_.bytes_in_flight -= pkt.payload_len;
        trace_pkt_drop(pkt, "no_rule");
        return hit;
    }
    return hit;
}

void Upf::ue_leg_delivered(const UserPacket& pkt) {
    counters_.delivered_ue++;
    counters_.bytes_delivered_ue += pkt.payload_len;
    counters_.in_flight--;
    counters_.bytes_in_flight -= pkt.payload_len;
    auto& d = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktDeliver);
    d["pkt_id"] = pkt.pkt_id;
    d["where"] = "ue";
    d["size"] = pkt.payload_len;
}

void Upf::ue_leg_dropped(const UserPacket& pkt) {
    counters_.dropped_link++;
    counters_.bytes_dropped_link += pkt.payload_len;
    counters_.in_flight--;
    counters_.bytes_in_flight -= pkt.payload_len;
    trace_pkt_drop(pkt, "link");
}

void Upf::trace_pkt_drop(const UserPacket& pkt, const char* reason) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktDrop);
    rec["pkt_id"] = pkt.pkt_id;
    rec["reason"] = reason;
    rec["size"] = pkt.payload_len;
}

}  // namespace orbit5gc

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orbit5gc/result.hpp"
#include "orbit5gc/sim.hpp"
#include "orbit5gc/trace.hpp"
#include "orbit5gc/types.hpp"

namespace orbit5gc {

enum class DnTarget { Onboard, Ground };
inline const char* dn_target_name(DnTarget t) { return t == DnTarget::Onboard ? "onboard" : "ground"; }

struct ForwardingRule {
    std::uint32_t session_id = 0;
    std::uint32_t tunnel_id = 0;
    std::uint32_t ue_ip = 0;
    DnTarget dn_target = DnTarget::Ground;
};

struct ClassifierRule {
    Ipv4Cidr dst_prefix;
    DnTarget dn_target = DnTarget::Ground;
    // priority = dst_prefix.prefix_len; longest match wins, duplicates
    // rejected at install so ties cannot occur
};

struct UserPacket {
    std::uint64_t pkt_id = 0;
    std::uint32_t tunnel_id = 0;  // uplink addressing
    std::uint32_t src_ip = 0;
    std::uint32_t dst_ip = 0;
    int payload_len = 0;
    TimeUs enqueue_time = 0;
};

// GTP-U-ish encapsulation: flags(1) msg_type(1) length(2) tunnel_id(4)
// sequence(4) spare(4).
constexpr int kTunnelHeaderBytes = 16;
std::vector<std::uint8_t> encode_tunnel_header(std::uint32_t tunnel_id, std::uint16_t payload_len,
                                               std::uint32_t sequence);

// Whole-path user-plane accounting. Conservation invariant:
//   in_uplink + in_downlink ==
//   delivered_onboard + delivered_ground + delivered_ue +
//   dropped_no_rule + dropped_link + in_flight
struct PacketCounters {
    std::uint64_t in_uplink = 0, in_downlink = 0;
    std::uint64_t delivered_onboard = 0, delivered_ground = 0, delivered_ue = 0;
    std::uint64_t dropped_no_rule = 0, dropped_link = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t bytes_in_uplink = 0, bytes_in_downlink = 0;
    std::uint64_t bytes_delivered_onboard = 0, bytes_delivered_ground = 0, bytes_delivered_ue = 0;
    std::uint64_t bytes_dropped_no_rule = 0, bytes_dropped_link = 0;
    std::uint64_t bytes_in_flight = 0;

    bool conserved() const {
        return in_uplink + in_downlink == delivered_onboard + delivered_ground + delivered_ue +
                                              dropped_no_rule + dropped_link + in_flight &&
               bytes_in_uplink + bytes_in_downlink ==
                   bytes_delivered_onboard + bytes_delivered_ground + bytes_delivered_ue +
                       bytes_dropped_no_rule + bytes_dropped_link + bytes_in_flight;
    }
};

enum class UpfError {
    Ok = 0,
    DuplicateRule,
    UnknownRule,
    NoSession,
    OversizePacket,
    DuplicatePrefix,
    MissingCatchAll,
    BadN4Message,
};
const char* upf_error_name(UpfError e);

// N4 rule messages: op(1: 1=install 2=remove) | session_id(4) |
// tunnel_id(4) | ue_ip(4) | dn_index(1)
constexpr std::size_t kN4MessageBytes = 14;
std::vector<std::uint8_t> encode_n4(bool install, const ForwardingRule& rule, std::uint8_t dn_index);

// User plane function: uplink classifier plus downlink tunnel lookup.
// The ingress/leg methods move the packet counters through the documented
// lifecycle; the simulation loop (or a test driving it the same way)
// calls the leg completions when link transfers resolve.
class Upf {
public:
    Upf(Simulator& sim, Tracer& tracer, int mtu);

    // dn_index -> target mapping used by N4 decode.
    void set_dn_table(std::vector<DnTarget> table) { dn_table_ = std::move(table); }

    UpfError install_classifier(const ClassifierRule& rule);
    // Validates the catch-all invariant after configuration load.
    UpfError finalize_classifier() const;

    UpfError handle_n4(std::span<const std::uint8_t> msg);
    UpfError install_rule(const ForwardingRule& rule);
    UpfError remove_rule(std::uint32_t session_id);
    bool has_rule(std::uint32_t session_id) const { return rules_.count(session_id) > 0; }
    std::size_t rule_count() const { return rules_.size(); }
    std::vector<std::uint32_t> rule_session_ids() const;

    // Pure classification: longest-prefix match over dst_ip after the
    // tunnel lookup. No counter movement.
    Result<DnTarget, UpfError> classify_uplink(const UserPacket& pkt) const;

    // Downlink lookup by ue_ip; returns tunnel id and encapsulated length.
    Result<std::pair<std::uint32_t, int>, UpfError> lookup_downlink(const UserPacket& pkt) const;

    // --- counter lifecycle -------------------------------------------
    void uplink_sent(const UserPacket& pkt);        // UE handed pkt to the RAN
    void uplink_link_dropped(const UserPacket& pkt);
    // Arrival at the UPF: classifies, counts onboard deliveries and
    // no-rule drops; Ground means a backhaul leg is still pending.
    Result<DnTarget, UpfError> uplink_arrived(const UserPacket& pkt);
    void ground_leg_delivered(const UserPacket& pkt);
    void ground_leg_dropped(const UserPacket& pkt);

    // DN-side ingress. Oversize is rejected before any counter moves;
    // arrival resolves the rule (UE-bound leg pending on success).
    UpfError downlink_sent(const UserPacket& pkt);
    void downlink_link_dropped(const UserPacket& pkt);
    Result<std::pair<std::uint32_t, int>, UpfError> downlink_arrived(const UserPacket& pkt);
    void ue_leg_delivered(const UserPacket& pkt);
    void ue_leg_dropped(const UserPacket& pkt);

    const PacketCounters& counters() const { return counters_; }
    int mtu() const { return mtu_; }

private:
    void trace_rule(const char* kind, const ForwardingRule& rule);
    void trace_pkt_drop(const UserPacket& pkt, const char* reason);

    Simulator& sim_;
    Tracer& tracer_;
    int mtu_;
    std::map<std::uint32_t, ForwardingRule> rules_;  // by session_id
    std::vector<ClassifierRule> classifier_;
    std::vector<DnTarget> dn_table_;
    PacketCounters counters_;
    std::uint32_t tunnel_sequence_ = 0;
};

}  // namespace orbit5gc

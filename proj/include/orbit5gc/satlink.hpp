#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "orbit5gc/sim.hpp"
#include "orbit5gc/trace.hpp"
#include "orbit5gc/types.hpp"

namespace orbit5gc {

constexpr double kSpeedOfLightMps = 299'792'458.0;
constexpr double kEarthRadiusKm = 6371.0;

struct LinkProfile {
    TimeUs one_way_delay_us = 0;
    double jitter_stddev_us = 0.0;  // half-normal sample added per transfer
    double loss_prob = 0.0;
    double uplink_bps = 0.0;    // 0 = no serialization delay
    double downlink_bps = 0.0;  // 0 = no serialization delay
    int mtu = 1500;
    bool reorder_allowed = false;
};

struct OrbitGeometry {
    double altitude_km = 550.0;
    double elevation_deg = 90.0;
};

struct ContactWindow {
    TimeUs open_at = 0;
    TimeUs close_at = 0;
};

// Ground-terminal to satellite slant range, spherical Earth, law of
// cosines. At 90 degrees elevation this is exactly the altitude.
double slant_range_km(const OrbitGeometry& geom);
double propagation_delay_us(const OrbitGeometry& geom);

// Terrestrial fiber at 2c/3.
double fiber_latency_us(double path_km);

struct LatencyComparison {
    double fiber_us = 0.0;
    double leo_us = 0.0;
    double improvement = 0.0;  // 1 - leo/fiber
};

constexpr double kDefaultFiberStretch = 1.5;

// hops one-way crossings (up + down >= 2) plus the ISL segment at c over
// the great-circle distance; fiber path = great-circle * stretch at 2c/3.
LatencyComparison compare_fiber_vs_leo(double ground_path_km, const OrbitGeometry& geom, int hops,
                                       double stretch = kDefaultFiberStretch);

enum class LinkDir { Up, Down };
inline const char* dir_name(LinkDir d) { return d == LinkDir::Up ? "up" : "down"; }

enum class WindowPolicy { Queue, Drop };

enum class TransmitOutcome { Scheduled, Queued, DroppedLoss, DroppedWindow, DroppedQueueFull, Oversize };

enum class Plane { Control, User };
inline const char* plane_name(Plane p) { return p == Plane::Control ? "control" : "user"; }

// One message handed to the link. Callbacks fire at delivery / drop time;
// the descriptive fields only feed the trace.
struct Transfer {
    Plane plane = Plane::Control;
    int size_bytes = 0;
    std::string src;
    std::string dst;
    std::string msg_type;          // NAS type name for control traffic
    std::uint64_t pkt_id = 0;      // user-plane packet id, 0 = none
    std::function<void()> on_deliver;
    std::function<void(const char* reason)> on_drop;
};

// Emulated satellite-terrestrial link: per-direction serialization from
// the profile's asymmetric rates, shared propagation delay, seeded jitter
// and loss, contact-window gating. FIFO delivery per direction unless the
// profile allows reordering.
class SatLink {
public:
    SatLink(Simulator& sim, Tracer& tracer, LinkProfile profile, std::vector<ContactWindow> windows,
            WindowPolicy policy, std::size_t queue_capacity, std::uint64_t seed);

    TransmitOutcome transmit(LinkDir dir, Transfer transfer);

    // Counts messages still queued for a future window as dropped; call
    // once after the event loop drains.
    void flush_queued(const char* reason = "flush");

    std::uint64_t bytes_sent(LinkDir dir) const { return chan(dir).bytes_sent; }
    std::size_t queued_count() const;

    const LinkProfile& profile() const { return profile_; }

    TimeUs serialization_us(LinkDir dir, int size_bytes) const;

private:
    struct Channel {
        std::deque<std::pair<std::uint64_t, Transfer>> window_queue;
        TimeUs last_delivery_us = 0;
        std::uint64_t bytes_sent = 0;
    };

    Channel& chan(LinkDir d) { return d == LinkDir::Up ? up_ : down_; }
    const Channel& chan(LinkDir d) const { return d == LinkDir::Up ? up_ : down_; }

    bool inside_window(TimeUs t) const;
    // First open_at strictly after t; -1 when no window ever opens again.
    TimeUs next_open_after(TimeUs t) const;

    bool schedule_delivery(LinkDir dir, std::uint64_t link_seq, Transfer transfer, TimeUs depart);
    void drop(LinkDir dir, std::uint64_t link_seq, Transfer& transfer, const char* reason);

    Simulator& sim_;
    Tracer& tracer_;
    LinkProfile profile_;
    std::vector<ContactWindow> windows_;  // sorted, disjoint; empty = always open
    WindowPolicy policy_;
    std::size_t queue_capacity_;
    std::mt19937_64 rng_;
    Channel up_, down_;
    std::uint64_t next_link_seq_ = 1;
};

}  // namespace orbit5gc

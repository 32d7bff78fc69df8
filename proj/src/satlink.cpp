#include "orbit5gc/satlink.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orbit5gc {

double slant_range_km(const OrbitGeometry& geom) {
    const double el = geom.elevation_deg * std::numbers::pi / 180.0;
    const double re = kEarthRadiusKm;
    const double h = geom.altitude_km;
    const double s = re * std::sin(el);
    return -s + std::sqrt(s * s + h * h + 2.0 * re * h);
}

double propagation_delay_us(const OrbitGeometry& geom) {
    return slant_range_km(geom) * 1000.0 / kSpeedOfLightMps * 1e6;
}

double fiber_latency_us(double path_km) {
    return path_km * 1000.0 / (2.0 * kSpeedOfLightMps / 3.0) * 1e6;
}

LatencyComparison compare_fiber_vs_leo(double ground_path_km, const OrbitGeometry& geom, int hops,
                                       double stretch) {
    LatencyComparison cmp;
    cmp.fiber_us = fiber_latency_us(ground_path_km * stretch);
    const double isl_us = ground_path_km * 1000.0 / kSpeedOfLightMps * 1e6;
    cmp.leo_us = hops * propagation_delay_us(geom) + isl_us;
    cmp.improvement = 1.0 - cmp.leo_us / cmp.fiber_us;
    return cmp;
}

SatLink::SatLink(Simulator& sim, Tracer& tracer, LinkProfile profile, std::vector<ContactWindow> windows,
                 WindowPolicy policy, std::size_t queue_capacity, std::uint64_t seed)
    : sim_(sim),
      tracer_(tracer),
      profile_(profile),
      windows_(std::move(windows)),
      policy_(policy),
      queue_capacity_(queue_capacity),
      rng_(seed) {
    std::sort(windows_.begin(), windows_.end(),
              [](const ContactWindow& a, const ContactWindow& b) { return a.open_at < b.open_at; });
}

TimeUs SatLink::serialization_us(LinkDir dir, int size_bytes) const {
    const double bps = dir == LinkDir::Up ? profile_.uplink_bps : profile_.downlink_bps;
    if (bps <= 0.0) return 0;
    return static_cast<TimeUs>(std::llround(size_bytes * 8.0 * 1e6 / bps));
}

bool SatLink::inside_window(TimeUs t) const {
    if (windows_.empty()) return true;
    for (const auto& w : windows_)
        if (t >= w.open_at && t < w.close_at) return true;
    return false;
}

TimeUs SatLink::next_open_after(TimeUs t) const {
    for (const auto& w : windows_)
        if (w.open_at > t) return w.open_at;
    return -1;
}

TransmitOutcome SatLink::transmit(LinkDir dir, Transfer transfer) {
    if (transfer.size_bytes > profile_.mtu) return TransmitOutcome::Oversize;

    const std::uint64_t link_seq = next_link_seq_++;
    const TimeUs now = sim_.now();
    auto& send = tracer_.append(now, sim_.current_event(), kind::LinkSend);
    send["dir"] = dir_name(dir);
    send["plane"] = plane_name(transfer.plane);
    send["link_seq"] = link_seq;
    send["size"] = transfer.size_bytes;
    send["src"] = transfer.src;
    send["dst"] = transfer.dst;
    if (!transfer.msg_type.empty()) send["msg_type"] = transfer.msg_type;
    if (transfer.pkt_id != 0) send["pkt_id"] = transfer.pkt_id;

    if (!inside_window(now)) {
        if (policy_ == WindowPolicy::Drop) {
            drop(dir, link_seq, transfer, "window");
            return TransmitOutcome::DroppedWindow;
        }
        auto& channel = chan(dir);
        if (channel.window_queue.size() >= queue_capacity_) {
            drop(dir, link_seq, transfer, "queue_full");
            return TransmitOutcome::DroppedQueueFull;
        }
        const TimeUs release = next_open_after(now);
        channel.window_queue.emplace_back(link_seq, std::move(transfer));
        auto& q = tracer_.append(now, sim_.current_event(), kind::LinkQueue);
        q["dir"] = dir_name(dir);
        q["link_seq"] = link_seq;
        q["release_at"] = release;  // -1: no future window, flushed at end
        if (release >= 0) {
            sim_.at(release, [this, dir] {
                auto& channel = chan(dir);
                if (channel.window_queue.empty()) return;
                auto [seq, t] = std::move(channel.window_queue.front());
                channel.window_queue.pop_front();
                schedule_delivery(dir, seq, std::move(t), sim_.now());
            });
        }
        return TransmitOutcome::Queued;
    }

    return schedule_delivery(dir, link_seq, std::move(transfer), now) ? TransmitOutcome::Scheduled
                                                                      : TransmitOutcome::DroppedLoss;
}

bool SatLink::schedule_delivery(LinkDir dir, std::uint64_t link_seq, Transfer transfer, TimeUs depart) {
    auto& channel = chan(dir);
    channel.bytes_sent += static_cast<std::uint64_t>(transfer.size_bytes);

    if (profile_.loss_prob > 0.0) {
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < profile_.loss_prob) {
            drop(dir, link_seq, transfer, "loss");
            return false;
        }
    }

    TimeUs jitter = 0;
    if (profile_.jitter_stddev_us > 0.0) {
        const double sample = std::normal_distribution<double>(0.0, profile_.jitter_stddev_us)(rng_);
        jitter = static_cast<TimeUs>(std::llround(std::abs(sample)));
    }

    TimeUs delivery = depart + serialization_us(dir, transfer.size_bytes) + profile_.one_way_delay_us + jitter;
    if (!profile_.reorder_allowed) delivery = std::max(delivery, channel.last_delivery_us);
    channel.last_delivery_us = delivery;

    sim_.at(delivery, [this, dir, link_seq, transfer = std::move(transfer)]() mutable {
        auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::LinkDeliver);
        rec["dir"] = dir_name(dir);
        rec["plane"] = plane_name(transfer.plane);
        rec["link_seq"] = link_seq;
        rec["size"] = transfer.size_bytes;
        rec["src"] = transfer.src;
        rec["dst"] = transfer.dst;
        if (!transfer.msg_type.empty()) rec["msg_type"] = transfer.msg_type;
        if (transfer.pkt_id != 0) rec["pkt_id"] = transfer.pkt_id;
        if (transfer.on_deliver) transfer.on_deliver();
    });
    return true;
}

void SatLink::drop(LinkDir dir, std::uint64_t link_seq, Transfer& transfer, const char* reason) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::LinkDrop);
    rec["dir"] = dir_name(dir);
    rec["plane"] = plane_name(transfer.plane);
    rec["link_seq"] = link_seq;
    rec["size"] = transfer.size_bytes;
    rec["reason"] = reason;
    if (!transfer.msg_type.empty()) rec["msg_type"] = transfer.msg_type;
    if (transfer.pkt_id != 0) rec["pkt_id"] = transfer.pkt_id;
    if (transfer.on_drop) transfer.on_drop(reason);
}

void SatLink::flush_queued(const char* reason) {
    for (LinkDir dir : {LinkDir::Up, LinkDir::Down}) {
        auto& channel = chan(dir);
        while (!channel.window_queue.empty()) {
            auto [seq, t] = std::move(channel.window_queue.front());
            channel.window_queue.pop_front();
            drop(dir, seq, t, reason);
        }
    }
}

std::size_t SatLink::queued_count() const { return up_.window_queue.size() + down_.window_queue.size(); }

}  // namespace orbit5gc

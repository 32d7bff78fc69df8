#include "orbit5gc/runner.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <thread>

#include "orbit5gc/amf.hpp"
#include "orbit5gc/ngap.hpp"
#include "orbit5gc/sim.hpp"

namespace orbit5gc {

namespace {

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

// Owns every simulation participant for one run and wires the message
// paths between them: UE <-> gNB relays, the satellite link, the onboard
// AMF/SMF/UPF trio, traffic generation and metrics collection.
class ScenarioRunner {
public:
    explicit ScenarioRunner(const ScenarioConfig& cfg)
        : cfg_(cfg),
          upf_(sim_, tracer_, cfg.link.mtu),
          smf_(sim_, tracer_, cfg.data_networks, IpPool(cfg.ip_pool), upf_),
          amf_(sim_, tracer_, smf_, {cfg.auth_pending_timeout_us, cfg.processing_us}, cfg.seed),
          link_(sim_, tracer_, cfg.link, cfg.windows, cfg.window_policy, cfg.window_queue_capacity,
                cfg.seed ^ 0x6c696e6bull) {
        write_run_meta();
        for (const auto& rule : cfg_.classifier) {
            const UpfError err = upf_.install_classifier(rule);
            assert(err == UpfError::Ok);
            (void)err;
        }
        const UpfError classifier_ok = upf_.finalize_classifier();
        assert(classifier_ok == UpfError::Ok);
        (void)classifier_ok;

        for (const auto& g : cfg_.gnbs) {
            SimGnb gnb;
            gnb.id = g.id;
            gnb.onboard = g.onboard;
            gnbs_[g.id] = gnb;
        }

        amf_.set_downlink_sender([this](const ngap::NgapEnvelope& env, nas::MessageType type) {
            route_downlink(env, type);
        });
        amf_.set_completion_hook([this](const nas::Supi& supi) { on_registration_complete(supi); });

        for (std::size_t i = 0; i < cfg_.ues.size(); ++i) {
            const auto& entry = cfg_.ues[i];
            amf_.add_subscriber(entry.supi, entry.key);
            auto& gnb = gnbs_.at(entry.gnb_id);
            const std::uint32_t ran_id = gnb.attach(i);
            SimUe::Config ue_cfg{cfg_.processing_us, cfg_.ue_retries, cfg_.retry_timeout_us};
            ues_.push_back(std::make_unique<SimUe>(sim_, tracer_, entry.supi, entry.key, entry.gnb_id,
                                                   ran_id, entry.slice_id, ue_cfg));
            ue_index_[entry.supi.digits()] = i;
            ues_.back()->set_send_fn([this](const SimUe& ue, const nas::NasMessage& msg, bool initial) {
                route_uplink(ue, msg, initial);
            });
            ues_.back()->set_notify_fn(
                [this](SimUe& ue, const SimUe::Notification& n) { on_ue_notification(ue, n); });
        }

        schedule_metrics();
        schedule_timeline();
    }

    RunResult run(bool real_time) {
        if (real_time) {
            // pace against the wall clock up to the scenario horizon; the
            // tail (in-flight drains, expired timers) runs immediately
            const auto start = std::chrono::steady_clock::now();
            while (true) {
                const TimeUs next = sim_.peek_next_time();
                if (next < 0) break;
                const TimeUs paced = std::min(next, cfg_.duration_us);
                std::this_thread::sleep_until(start + std::chrono::microseconds(paced));
                sim_.step();
            }
        } else {
            sim_.run();
        }
        link_.flush_queued();
        write_counters_final();
        return collect();
    }

private:
    // ---- control plane routing --------------------------------------

    void route_uplink(const SimUe& ue, const nas::NasMessage& msg, bool initial) {
        auto encoded = nas::encode(msg);
        if (!encoded.ok()) return;
        ngap::NgapEnvelope env{initial ? ngap::Procedure::InitialUeMessage
                                       : ngap::Procedure::UplinkNasTransport,
                               ue.gnb_id(), ue.ue_ran_id(), encoded.take()};
        const auto& gnb = gnbs_.at(ue.gnb_id());
        if (gnb.onboard) {
            sim_.at(sim_.now(), [this, env] { amf_.handle_uplink(env); });
            return;
        }
        Transfer t;
        t.plane = Plane::Control;
        t.size_bytes = static_cast<int>(env.wire_size());
        t.src = "gnb:" + std::to_string(env.gnb_id);
        t.dst = "amf";
        t.msg_type = nas::message_type_name(msg.type);
        t.on_deliver = [this, env] { amf_.handle_uplink(env); };
        link_.transmit(LinkDir::Up, std::move(t));
    }

    void route_downlink(const ngap::NgapEnvelope& env, nas::MessageType type) {
        const auto& gnb = gnbs_.at(env.gnb_id);
        if (gnb.onboard) {
            sim_.at(sim_.now(), [this, env] { deliver_downlink(env); });
            return;
        }
        Transfer t;
        t.plane = Plane::Control;
        t.size_bytes = static_cast<int>(env.wire_size());
        t.src = "amf";
        t.dst = "gnb:" + std::to_string(env.gnb_id);
        t.msg_type = nas::message_type_name(type);
        t.on_deliver = [this, env] { deliver_downlink(env); };
        link_.transmit(LinkDir::Down, std::move(t));
    }

    void deliver_downlink(const ngap::NgapEnvelope& env) {
        auto it = gnbs_.find(env.gnb_id);
        if (it == gnbs_.end()) return;
        auto ue_it = it->second.ue_by_ran_id.find(env.ue_ran_id);
        if (ue_it == it->second.ue_by_ran_id.end()) return;
        auto decoded = nas::decode(env.nas_payload);
        if (!decoded.ok()) return;
        ues_[ue_it->second]->handle_downlink_nas(decoded.value());
    }

    // ---- procedure bookkeeping ---------------------------------------

    std::size_t new_procedure(const char* proc, const std::string& supi) {
        ProcedureResult r;
        r.proc = proc;
        r.supi = supi;
        r.outcome = "pending";
        results_.push_back(r);
        return results_.size() - 1;
    }

    void trace_outcome(const ProcedureResult& r, TimeUs start_us) {
        auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::ProcOutcome);
        rec["proc"] = r.proc;
        rec["supi"] = r.supi;
        rec["outcome"] = r.outcome;
        rec["start_us"] = start_us;
        if (r.outcome == "ok") rec["latency_us"] = static_cast<TimeUs>(r.latency_ms * 1000.0 + 0.5);
        if (!r.dn.empty()) rec["dn"] = r.dn;
        if (r.proc == "traffic") {
            rec["sent"] = r.sent;
            rec["delivered"] = r.delivered;
            rec["dropped"] = r.dropped;
        }
    }

    void on_registration_complete(const nas::Supi& supi) {
        auto it = pending_reg_.find(supi.digits());
        if (it == pending_reg_.end()) return;
        auto& r = results_[it->second.index];
        r.outcome = "ok";
        r.latency_ms = us_to_ms(sim_.now() - it->second.start_us);
        const auto& ue = *ues_[ue_index_.at(supi.digits())];
        for (TimeUs x : ue.exchange_latencies()) r.exchanges_ms.push_back(us_to_ms(x));
        trace_outcome(r, it->second.start_us);
        pending_reg_.erase(it);
    }

    void on_ue_notification(SimUe& ue, const SimUe::Notification& n) {
        using Kind = SimUe::Notification::Kind;
        const std::string supi = ue.supi().digits();
        switch (n.kind) {
            case Kind::Registered:
                break;  // procedure completes when the AMF sees RegistrationComplete
            case Kind::RegistrationRejected: {
                auto it = pending_reg_.find(supi);
                if (it == pending_reg_.end()) break;
                auto& r = results_[it->second.index];
                r.outcome = "rejected";
                r.cause = n.cause;
                trace_outcome(r, it->second.start_us);
                pending_reg_.erase(it);
                break;
            }
            case Kind::SessionAccepted: {
                auto it = pending_session_.find(supi + "|" + n.dn);
                session_owner_[n.session.tunnel_id] = {supi, n.dn};
                ue_by_ip_[n.session.ue_ip] = ue_index_.at(supi);
                if (it == pending_session_.end()) break;
                auto& r = results_[it->second.index];
                r.outcome = "ok";
                r.latency_ms = us_to_ms(sim_.now() - it->second.start_us);
                r.dn = n.dn;
                r.ue_ip = format_ipv4(n.session.ue_ip);
                r.session_id = n.session.session_id;
                trace_outcome(r, it->second.start_us);
                pending_session_.erase(it);
                break;
            }
            case Kind::SessionRejected: {
                auto it = pending_session_.find(supi + "|" + n.dn);
                if (it == pending_session_.end()) break;
                auto& r = results_[it->second.index];
                r.outcome = "rejected";
                r.cause = n.cause;
                r.dn = n.dn;
                trace_outcome(r, it->second.start_us);
                pending_session_.erase(it);
                break;
            }
            case Kind::ReleaseCompleted: {
                if (n.session.ue_ip) ue_by_ip_.erase(n.session.ue_ip);
                auto it = pending_release_.find(supi + "|" + n.dn);
                if (it == pending_release_.end()) break;
                auto& r = results_[it->second.index];
                r.outcome = "ok";
                r.latency_ms = us_to_ms(sim_.now() - it->second.start_us);
                r.dn = n.dn;
                trace_outcome(r, it->second.start_us);
                pending_release_.erase(it);
                break;
            }
        }
    }

    // ---- user plane ---------------------------------------------------

    struct TrafficJob {
        std::size_t index = 0;  // results_ slot
        int pending = 0;
        TimeUs start_us = 0;
    };

    void job_resolve(std::size_t job_id, bool delivered) {
        auto& job = jobs_[job_id];
        auto& r = results_[job.index];
        if (delivered)
            r.delivered++;
        else
            r.dropped++;
        if (--job.pending == 0) {
            r.outcome = "ok";
            trace_outcome(r, job.start_us);
        }
    }

    void send_uplink_packet(std::size_t ue_idx, std::size_t job_id, const TimelineAction& act) {
        auto& ue = *ues_[ue_idx];
        auto session = act.dn.empty()
                           ? (ue.sessions().empty()
                                  ? std::nullopt
                                  : std::optional<UeSessionInfo>(ue.sessions().begin()->second))
                           : ue.session_for(act.dn);
        auto& r = results_[jobs_[job_id].index];
        if (!session) {
            jobs_[job_id].pending--;
            if (jobs_[job_id].pending == 0) {
                r.outcome = r.sent == 0 ? "no_session" : "ok";
                trace_outcome(r, jobs_[job_id].start_us);
            }
            return;
        }
        UserPacket pkt;
        pkt.pkt_id = next_pkt_id_++;
        pkt.tunnel_id = session->tunnel_id;
        pkt.src_ip = session->ue_ip;
        pkt.dst_ip = act.dst_ip;
        pkt.payload_len = act.size;
        pkt.enqueue_time = sim_.now();
        r.sent++;
        upf_.uplink_sent(pkt);
        auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktSend);
        rec["pkt_id"] = pkt.pkt_id;
        rec["src"] = "ue:" + ue.supi().digits();
        rec["dst_ip"] = format_ipv4(pkt.dst_ip);
        rec["size"] = pkt.payload_len;
        rec["wire_size"] = pkt.payload_len + kTunnelHeaderBytes;

        const auto& gnb = gnbs_.at(ue.gnb_id());
        if (gnb.onboard) {
            on_uplink_arrival(pkt, job_id);
            return;
        }
        Transfer t;
        t.plane = Plane::User;
        t.size_bytes = pkt.payload_len + kTunnelHeaderBytes;
        t.src = "gnb:" + std::to_string(ue.gnb_id());
        t.dst = "upf";
        t.pkt_id = pkt.pkt_id;
        t.on_deliver = [this, pkt, job_id] { on_uplink_arrival(pkt, job_id); };
        t.on_drop = [this, pkt, job_id](const char*) {
            upf_.uplink_link_dropped(pkt);
            job_resolve(job_id, false);
        };
        link_.transmit(LinkDir::Up, std::move(t));
    }

    void on_uplink_arrival(const UserPacket& pkt, std::size_t job_id) {
        auto target = upf_.uplink_arrived(pkt);
        if (!target.ok()) {
            job_resolve(job_id, false);
            return;
        }
        if (target.value() == DnTarget::Onboard) {
            job_resolve(job_id, true);
            maybe_echo(pkt);
            return;
        }
        // Ground data network: the backhaul leg crosses the downlink.
        const std::string dn = dn_of_tunnel(pkt.tunnel_id);
        Transfer t;
        t.plane = Plane::User;
        t.size_bytes = pkt.payload_len + kTunnelHeaderBytes;
        t.src = "upf";
        t.dst = "dn:" + dn;
        t.pkt_id = pkt.pkt_id;
        t.on_deliver = [this, pkt, job_id] {
            upf_.ground_leg_delivered(pkt);
            job_resolve(job_id, true);
            maybe_echo(pkt);
        };
        t.on_drop = [this, pkt, job_id](const char*) {
            upf_.ground_leg_dropped(pkt);
            job_resolve(job_id, false);
        };
        link_.transmit(LinkDir::Down, std::move(t));
    }

    std::string dn_of_tunnel(std::uint32_t tunnel_id) const {
        auto it = session_owner_.find(tunnel_id);
        return it == session_owner_.end() ? "?" : it->second.second;
    }

    void maybe_echo(const UserPacket& orig) {
        auto it = session_owner_.find(orig.tunnel_id);
        if (it == session_owner_.end()) return;
        const DataNetworkConfig* dn = smf_.find_dn(it->second.second);
        if (!dn || !dn->echo) return;
        UserPacket reply;
        reply.pkt_id = next_pkt_id_++;
        reply.src_ip = orig.dst_ip;
        reply.dst_ip = orig.src_ip;
        reply.payload_len = orig.payload_len;
        reply.enqueue_time = sim_.now();
        if (upf_.downlink_sent(reply) != UpfError::Ok) return;
        auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::UserPktSend);
        rec["pkt_id"] = reply.pkt_id;
        rec["src"] = "dn:" + dn->name;
        rec["dst_ip"] = format_ipv4(reply.dst_ip);
        rec["size"] = reply.payload_len;
        rec["wire_size"] = reply.payload_len + kTunnelHeaderBytes;
        if (dn->target == DnTarget::Onboard) {
            on_downlink_arrival(reply);
            return;
        }
        Transfer t;
        t.plane = Plane::User;
        t.size_bytes = reply.payload_len + kTunnelHeaderBytes;
        t.src = "dn:" + dn->name;
        t.dst = "upf";
        t.pkt_id = reply.pkt_id;
        t.on_deliver = [this, reply] { on_downlink_arrival(reply); };
        t.on_drop = [this, reply](const char*) { upf_.downlink_link_dropped(reply); };
        link_.transmit(LinkDir::Up, std::move(t));
    }

    void on_downlink_arrival(const UserPacket& pkt) {
        auto hit = upf_.downlink_arrived(pkt);
        if (!hit.ok()) return;
        const auto [tunnel_id, wire_len] = hit.value();
        auto owner = ue_by_ip_.find(pkt.dst_ip);
        if (owner == ue_by_ip_.end()) {
            upf_.ue_leg_dropped(pkt);
            return;
        }
        const auto& ue = *ues_[owner->second];
        const auto& gnb = gnbs_.at(ue.gnb_id());
        if (gnb.onboard) {
            upf_.ue_leg_delivered(pkt);
            return;
        }
        Transfer t;
        t.plane = Plane::User;
        t.size_bytes = wire_len;
        t.src = "upf";
        t.dst = "gnb:" + std::to_string(ue.gnb_id());
        t.pkt_id = pkt.pkt_id;
        t.on_deliver = [this, pkt] { upf_.ue_leg_delivered(pkt); };
        t.on_drop = [this, pkt](const char*) { upf_.ue_leg_dropped(pkt); };
        link_.transmit(LinkDir::Down, std::move(t));
    }

    // ---- timeline and metrics ------------------------------------------

    void schedule_timeline() {
        for (const auto& act : cfg_.timeline) {
            sim_.at(act.at_us, [this, act] { execute_action(act); });
        }
    }

    void execute_action(const TimelineAction& act) {
        const std::size_t ue_idx = ue_index_.at(act.ue_supi);
        auto& ue = *ues_[ue_idx];
        switch (act.kind) {
            case ActionKind::Register: {
                const std::size_t idx = new_procedure("registration", act.ue_supi);
                if (auto old = pending_reg_.find(act.ue_supi); old != pending_reg_.end()) {
                    results_[old->second.index].outcome = "superseded";
                    trace_outcome(results_[old->second.index], old->second.start_us);
                }
                pending_reg_[act.ue_supi] = {idx, sim_.now()};
                ue.start_registration();
                sim_.after(cfg_.registration_timeout_us, [this, supi = act.ue_supi, idx] {
                    auto it = pending_reg_.find(supi);
                    if (it == pending_reg_.end() || it->second.index != idx) return;
                    auto& r = results_[idx];
                    r.outcome = "timeout";
                    trace_outcome(r, it->second.start_us);
                    pending_reg_.erase(it);
                });
                break;
            }
            case ActionKind::Session: {
                const std::size_t idx = new_procedure("session", act.ue_supi);
                results_[idx].dn = act.dn;
                const std::string key = act.ue_supi + "|" + act.dn;
                if (auto old = pending_session_.find(key); old != pending_session_.end()) {
                    results_[old->second.index].outcome = "superseded";
                    trace_outcome(results_[old->second.index], old->second.start_us);
                }
                pending_session_[key] = {idx, sim_.now()};
                ue.start_session(act.dn, act.qos);
                sim_.after(cfg_.registration_timeout_us, [this, key = act.ue_supi + "|" + act.dn, idx] {
                    auto it = pending_session_.find(key);
                    if (it == pending_session_.end() || it->second.index != idx) return;
                    auto& r = results_[idx];
                    r.outcome = "timeout";
                    trace_outcome(r, it->second.start_us);
                    pending_session_.erase(it);
                });
                break;
            }
            case ActionKind::Release: {
                const std::size_t idx = new_procedure("release", act.ue_supi);
                results_[idx].dn = act.dn;
                if (!ue.session_for(act.dn)) {
                    results_[idx].outcome = "no_session";
                    trace_outcome(results_[idx], sim_.now());
                    break;
                }
                pending_release_[act.ue_supi + "|" + act.dn] = {idx, sim_.now()};
                ue.start_release(act.dn);
                sim_.after(cfg_.registration_timeout_us, [this, key = act.ue_supi + "|" + act.dn, idx] {
                    auto it = pending_release_.find(key);
                    if (it == pending_release_.end() || it->second.index != idx) return;
                    auto& r = results_[idx];
                    r.outcome = "timeout";
                    trace_outcome(r, it->second.start_us);
                    pending_release_.erase(it);
                });
                break;
            }
            case ActionKind::Deregister: {
                const std::size_t idx = new_procedure("deregister", act.ue_supi);
                for (const auto& [dn, s] : ue.sessions()) ue_by_ip_.erase(s.ue_ip);
                ue.start_deregister();
                results_[idx].outcome = "sent";
                trace_outcome(results_[idx], sim_.now());
                break;
            }
            case ActionKind::Traffic: {
                const std::size_t idx = new_procedure("traffic", act.ue_supi);
                results_[idx].dn = act.dn;
                jobs_.push_back({idx, act.count, sim_.now()});
                const std::size_t job_id = jobs_.size() - 1;
                for (int i = 0; i < act.count; ++i) {
                    sim_.at(sim_.now() + i * act.interval_us,
                            [this, ue_idx, job_id, act] { send_uplink_packet(ue_idx, job_id, act); });
                }
                break;
            }
        }
    }

    void schedule_metrics() {
        std::vector<TimeUs> ticks;
        for (TimeUs t = cfg_.metrics_cadence_us; t <= cfg_.duration_us; t += cfg_.metrics_cadence_us)
            ticks.push_back(t);
        if (cfg_.duration_us % cfg_.metrics_cadence_us != 0) ticks.push_back(cfg_.duration_us);
        for (TimeUs t : ticks) {
            sim_.at(t, [this] {
                MetricsRow row;
                row.t_s = us_to_s(sim_.now());
                row.events_processed = sim_.events_processed();
                row.bytes_up = link_.bytes_sent(LinkDir::Up);
                row.bytes_down = link_.bytes_sent(LinkDir::Down);
                const ContextStats stats = amf_.context_table_stats();
                row.active_ues = stats.active_ues;
                row.registered_ues = stats.registered;
                row.active_sessions = smf_.active_session_count();
                row.context_bytes_estimate = stats.bytes_estimate;
                row.pkt = upf_.counters();
                metrics_.push_back(row);
            });
        }
    }

    // ---- meta / collection ----------------------------------------------

    void write_run_meta() {
        auto& meta = tracer_.append(0, 0, kind::RunMeta);
        meta["scenario"] = cfg_.name;
        meta["seed"] = cfg_.seed;
        meta["duration_us"] = cfg_.duration_us;
        meta["cadence_us"] = cfg_.metrics_cadence_us;
        meta["processing_us"] = cfg_.processing_us;
        meta["link"]["one_way_delay_us"] = cfg_.link.one_way_delay_us;
        meta["link"]["jitter_stddev_us"] = cfg_.link.jitter_stddev_us;
        meta["link"]["loss_prob"] = cfg_.link.loss_prob;
        meta["link"]["uplink_bps"] = cfg_.link.uplink_bps;
        meta["link"]["downlink_bps"] = cfg_.link.downlink_bps;
        meta["link"]["mtu"] = cfg_.link.mtu;
        meta["link"]["reorder_allowed"] = cfg_.link.reorder_allowed;
        meta["window_policy"] = cfg_.window_policy == WindowPolicy::Queue ? "queue" : "drop";
        auto windows = nlohmann::ordered_json::array();
        for (const auto& w : cfg_.windows)
            windows.push_back({{"open_us", w.open_at}, {"close_us", w.close_at}});
        meta["windows"] = windows;
        auto dns = nlohmann::ordered_json::array();
        for (const auto& dn : cfg_.data_networks)
            dns.push_back({{"name", dn.name}, {"target", dn_target_name(dn.target)}, {"echo", dn.echo}});
        meta["data_networks"] = dns;
        auto cls = nlohmann::ordered_json::array();
        for (const auto& r : cfg_.classifier)
            cls.push_back({{"prefix", format_cidr(r.dst_prefix)}, {"target", dn_target_name(r.dn_target)}});
        meta["classifier"] = cls;
        meta["ue_count"] = cfg_.ues.size();
        meta["ue_retries"] = cfg_.ue_retries;
        meta["format"] = "orbit5gc-trace-1";
    }

    void write_counters_final() {
        const auto& c = upf_.counters();
        auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::CountersFinal);
        rec["in_uplink"] = c.in_uplink;
        rec["in_downlink"] = c.in_downlink;
        rec["delivered_onboard"] = c.delivered_onboard;
        rec["delivered_ground"] = c.delivered_ground;
        rec["delivered_ue"] = c.delivered_ue;
        rec["dropped_no_rule"] = c.dropped_no_rule;
        rec["dropped_link"] = c.dropped_link;
        rec["in_flight"] = c.in_flight;
        rec["bytes_in_uplink"] = c.bytes_in_uplink;
        rec["bytes_in_downlink"] = c.bytes_in_downlink;
        rec["conserved"] = c.conserved();
    }

    RunResult collect() {
        RunResult out;
        out.scenario_name = cfg_.name;
        out.seed = cfg_.seed;
        out.trace_text = tracer_.serialize();
        out.trace_hash = fnv1a64(out.trace_text);
        out.trace_records = tracer_.size();
        out.metrics = metrics_;
        out.procedures = results_;
        out.counters = upf_.counters();
        out.events_processed = sim_.events_processed();
        out.bytes_up = link_.bytes_sent(LinkDir::Up);
        out.bytes_down = link_.bytes_sent(LinkDir::Down);
        return out;
    }

    struct Pending {
        std::size_t index = 0;
        TimeUs start_us = 0;
    };

    ScenarioConfig cfg_;
    Simulator sim_;
    Tracer tracer_;
    Upf upf_;
    Smf smf_;
    Amf amf_;
    SatLink link_;
    std::map<std::uint32_t, SimGnb> gnbs_;
    std::vector<std::unique_ptr<SimUe>> ues_;
    std::map<std::string, std::size_t> ue_index_;
    std::map<std::string, Pending> pending_reg_;
    std::map<std::string, Pending> pending_session_;
    std::map<std::string, Pending> pending_release_;
    std::map<std::uint32_t, std::pair<std::string, std::string>> session_owner_;  // tunnel -> (supi, dn)
    std::map<std::uint32_t, std::size_t> ue_by_ip_;
    std::vector<TrafficJob> jobs_;
    std::vector<ProcedureResult> results_;
    std::vector<MetricsRow> metrics_;
    std::uint64_t next_pkt_id_ = 1;
};

}  // namespace

std::string metrics_csv_header() {
    return "t_s,events_processed,bytes_up,bytes_down,active_ues,registered_ues,active_sessions,"
           "context_bytes_estimate,pkt_in_uplink,pkt_in_downlink,pkt_delivered_onboard,"
           "pkt_delivered_ground,pkt_delivered_ue,pkt_dropped_no_rule,pkt_dropped_link,pkt_in_flight,"
           "bytes_pkt_uplink,bytes_pkt_downlink,bytes_pkt_delivered_onboard,bytes_pkt_delivered_ground,"
           "bytes_pkt_delivered_ue,bytes_pkt_dropped_no_rule,bytes_pkt_dropped_link,bytes_pkt_in_flight";
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = metrics_csv_header() + "\n";
    for (const auto& r : rows) {
        out += fmt_seconds(r.t_s);
        out += ',' + std::to_string(r.events_processed);
        out += ',' + std::to_string(r.bytes_up);
        out += ',' + std::to_string(r.bytes_down);
        out += ',' + std::to_string(r.active_ues);
        out += ',' + std::to_string(r.registered_ues);
        out += ',' + std::to_string(r.active_sessions);
        out += ',' + std::to_string(r.context_bytes_estimate);
        for (std::uint64_t v :
             {r.pkt.in_uplink, r.pkt.in_downlink, r.pkt.delivered_onboard, r.pkt.delivered_ground,
              r.pkt.delivered_ue, r.pkt.dropped_no_rule, r.pkt.dropped_link, r.pkt.in_flight,
              r.pkt.bytes_in_uplink, r.pkt.bytes_in_downlink, r.pkt.bytes_delivered_onboard,
              r.pkt.bytes_delivered_ground, r.pkt.bytes_delivered_ue, r.pkt.bytes_dropped_no_rule,
              r.pkt.bytes_dropped_link, r.pkt.bytes_in_flight})
            out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json RunResult::summary() const {
    nlohmann::ordered_json s;
    s["scenario"] = scenario_name;
    s["seed"] = seed;
    s["events_processed"] = events_processed;
    s["trace_records"] = trace_records;
    s["trace_hash"] = hash_hex(trace_hash);
    s["bytes_up"] = bytes_up;
    s["bytes_down"] = bytes_down;
    s["metrics_rows"] = metrics.size();
    auto procs = nlohmann::ordered_json::array();
    for (const auto& p : procedures) {
        nlohmann::ordered_json j;
        j["proc"] = p.proc;
        j["supi"] = p.supi;
        j["outcome"] = p.outcome;
        if (p.outcome == "ok") j["latency_ms"] = p.latency_ms;
        if (!p.exchanges_ms.empty()) j["exchanges_ms"] = p.exchanges_ms;
        if (!p.dn.empty()) j["dn"] = p.dn;
        if (!p.ue_ip.empty()) j["ue_ip"] = p.ue_ip;
        if (p.session_id) j["session_id"] = p.session_id;
        if (p.cause) j["cause"] = p.cause;
        if (p.proc == "traffic") {
            j["sent"] = p.sent;
            j["delivered"] = p.delivered;
            j["dropped"] = p.dropped;
        }
        procs.push_back(j);
    }
    s["procedures"] = procs;
    s["counters"]["in_uplink"] = counters.in_uplink;
    s["counters"]["in_downlink"] = counters.in_downlink;
    s["counters"]["delivered_onboard"] = counters.delivered_onboard;
    s["counters"]["delivered_ground"] = counters.delivered_ground;
    s["counters"]["delivered_ue"] = counters.delivered_ue;
    s["counters"]["dropped_no_rule"] = counters.dropped_no_rule;
    s["counters"]["dropped_link"] = counters.dropped_link;
    s["counters"]["in_flight"] = counters.in_flight;
    s["counters"]["conserved"] = counters.conserved();
    return s;
}

RunResult run_scenario(const ScenarioConfig& cfg, std::optional<std::uint64_t> seed_override,
                       bool real_time) {
    ScenarioConfig effective = cfg;
    if (seed_override) effective.seed = *seed_override;
    ScenarioRunner runner(effective);
    return runner.run(real_time);
}

}  // namespace orbit5gc

#include "orbit5gc/verify.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "orbit5gc/trace.hpp"
#include "orbit5gc/types.hpp"

namespace orbit5gc {

namespace {

using json = nlohmann::json;

struct Window {
    TimeUs open_us, close_us;
};

struct Checker {
    explicit Checker(const std::vector<json>& r) : recs(r) {}

    const std::vector<json>& recs;
    VerifyReport report;

    TimeUs owd = 0;
    double loss_prob = 0.0;
    int ue_retries = 0;
    bool reorder_allowed = false;
    std::string window_policy;
    std::vector<Window> windows;

    void violate(const std::string& invariant, std::vector<std::size_t> indices, std::string detail) {
        report.violations.push_back({invariant, std::move(indices), std::move(detail)});
    }

    static std::string kind_of(const json& r) { return r.value("kind", ""); }

    bool inside_window(TimeUs t) const {
        if (windows.empty()) return true;
        for (const auto& w : windows)
            if (t >= w.open_us && t < w.close_us) return true;
        return false;
    }

    void load_meta() {
        const json& meta = recs[0];
        owd = meta["link"].value("one_way_delay_us", 0);
        loss_prob = meta["link"].value("loss_prob", 0.0);
        reorder_allowed = meta["link"].value("reorder_allowed", false);
        ue_retries = meta.value("ue_retries", 0);
        window_policy = meta.value("window_policy", "queue");
        if (meta.contains("windows"))
            for (const auto& w : meta["windows"]) windows.push_back({w["open_us"], w["close_us"]});
    }

    void check_time_order() {
        TimeUs prev = 0;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const TimeUs t = recs[i].value("t_us", TimeUs{0});
            if (t < prev) violate("record-time-order", {i - 1, i}, "t_us decreased");
            prev = t;
        }
    }

    void check_link() {
        struct SendInfo {
            std::size_t index;
            TimeUs t;
            std::string dir;
        };
        std::map<std::uint64_t, SendInfo> sends;
        std::map<std::uint64_t, TimeUs> queue_release;
        std::map<std::string, std::uint64_t> last_delivered_seq;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            const std::string kind = kind_of(r);
            if (kind == kind::LinkSend) {
                sends[r["link_seq"]] = {i, r["t_us"], r["dir"]};
            } else if (kind == kind::LinkQueue) {
                queue_release[r["link_seq"]] = r.value("release_at", TimeUs{-1});
            } else if (kind == kind::LinkDeliver) {
                const std::uint64_t seq = r["link_seq"];
                auto it = sends.find(seq);
                if (it == sends.end()) {
                    violate("link-delivery-before-send", {i}, "delivery without a matching send");
                    continue;
                }
                const TimeUs t_send = it->second.t;
                const TimeUs t_del = r["t_us"];
                if (t_del < t_send + owd)
                    violate("link-min-delay", {it->second.index, i},
                            "delivered earlier than send + one_way_delay");
                if (!inside_window(t_send)) {
                    auto q = queue_release.find(seq);
                    if (q == queue_release.end())
                        violate("window-gating", {it->second.index, i},
                                "sent outside every contact window without queueing");
                    else if (q->second < 0 || t_del < q->second + owd)
                        violate("window-gating", {it->second.index, i},
                                "queued message delivered before the next window opened");
                }
                if (!reorder_allowed) {
                    const std::string dir = r["dir"];
                    auto& last = last_delivered_seq[dir];
                    if (seq < last)
                        violate("link-fifo-order", {i}, "older link_seq delivered after a newer one");
                    else
                        last = seq;
                }
            }
        }
    }

    void check_conservation() {
        std::size_t final_idx = recs.size();
        for (std::size_t i = recs.size(); i-- > 0;) {
            if (kind_of(recs[i]) == kind::CountersFinal) {
                final_idx = i;
                break;
            }
        }
        if (final_idx == recs.size()) {
            violate("counters-final-present", {}, "trace has no CountersFinal record");
            return;
        }
        const auto& fin = recs[final_idx];
        if (fin.value("in_flight", std::uint64_t{1}) != 0)
            violate("conservation", {final_idx}, "in_flight nonzero at end of run");
        if (!fin.value("conserved", false))
            violate("conservation", {final_idx}, "final counters fail the conservation equation");

        std::uint64_t in_uplink = 0, in_downlink = 0;
        std::uint64_t delivered_onboard = 0, delivered_ground = 0, delivered_ue = 0;
        std::uint64_t dropped_no_rule = 0, dropped_link = 0;
        std::map<std::uint64_t, int> terminal;  // pkt_id -> terminal record count
        std::map<std::uint64_t, std::size_t> send_of;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            const std::string kind = kind_of(r);
            if (kind == kind::UserPktSend) {
                const std::string src = r.value("src", "");
                if (src.rfind("ue:", 0) == 0)
                    ++in_uplink;
                else
                    ++in_downlink;
                const std::uint64_t id = r["pkt_id"];
                if (send_of.count(id)) violate("pkt-unique-id", {send_of[id], i}, "pkt_id reused");
                send_of[id] = i;
                terminal[id] = 0;
            } else if (kind == kind::UserPktDeliver) {
                const std::string where = r.value("where", "");
                if (where == "onboard") ++delivered_onboard;
                if (where == "ground") ++delivered_ground;
                if (where == "ue") ++delivered_ue;
                terminal[r["pkt_id"]]++;
            } else if (kind == kind::UserPktDrop) {
                const std::string reason = r.value("reason", "");
                if (reason == "no_rule")
                    ++dropped_no_rule;
                else
                    ++dropped_link;
                terminal[r["pkt_id"]]++;
            }
        }
        for (const auto& [id, n] : terminal) {
            if (n != 1)
                violate("pkt-terminal-exactly-once", {send_of.count(id) ? send_of[id] : 0},
                        "packet " + std::to_string(id) + " has " + std::to_string(n) +
                            " terminal records");
        }
        const std::uint64_t ingress = in_uplink + in_downlink;
        const std::uint64_t egress =
            delivered_onboard + delivered_ground + delivered_ue + dropped_no_rule + dropped_link;
        if (ingress != egress)
            violate("conservation", {final_idx},
                    "trace-recomputed ingress " + std::to_string(ingress) + " != egress " +
                        std::to_string(egress));
        auto expect = [&](const char* field, std::uint64_t got) {
            if (fin.value(field, std::uint64_t{0}) != got)
                violate("counters-match-trace", {final_idx},
                        std::string(field) + " counter disagrees with trace tally");
        };
        expect("in_uplink", in_uplink);
        expect("in_downlink", in_downlink);
        expect("delivered_onboard", delivered_onboard);
        expect("delivered_ground", delivered_ground);
        expect("delivered_ue", delivered_ue);
        expect("dropped_no_rule", dropped_no_rule);
        expect("dropped_link", dropped_link);
    }

    void check_state_lag() {
        std::map<std::string, long> amf_minus_ue;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            if (kind_of(r) != kind::UeState || r.value("state", "") != "Registered") continue;
            const std::string supi = r.value("supi", "");
            const std::string side = r.value("side", "");
            if (side == "amf") amf_minus_ue[supi]++;
            if (side == "ue") {
                amf_minus_ue[supi]--;
                if (amf_minus_ue[supi] < 0)
                    violate("ue-state-lag", {i}, "UE reached Registered before the AMF did: " + supi);
            }
        }
    }

    void check_smf_upf_agreement() {
        std::set<std::uint32_t> active_sessions, rules;
        std::map<std::uint32_t, std::string> session_supi;
        std::map<std::string, std::string> amf_state;
        std::uint64_t current_ev = 0;
        std::size_t boundary_idx = 0;

        auto at_boundary = [&](std::size_t i) {
            if (active_sessions != rules) {
                violate("smf-upf-agreement", {boundary_idx, i},
                        "active session set differs from installed rule set at an event boundary");
            }
            for (std::uint32_t id : active_sessions) {
                const auto& supi = session_supi[id];
                if (amf_state[supi] != "Registered")
                    violate("session-requires-registered", {boundary_idx, i},
                            "session " + std::to_string(id) + " active while " + supi +
                                " is not Registered");
            }
        };

        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            const std::uint64_t ev = r.value("ev", std::uint64_t{0});
            if (ev != current_ev) {
                at_boundary(i);
                current_ev = ev;
                boundary_idx = i;
            }
            const std::string kind = kind_of(r);
            if (kind == kind::SessionState) {
                const std::uint32_t id = r["session_id"];
                const std::string state = r.value("state", "");
                session_supi[id] = r.value("supi", "");
                if (state == "Active")
                    active_sessions.insert(id);
                else if (state == "Released")
                    active_sessions.erase(id);
            } else if (kind == kind::RuleInstall) {
                rules.insert(static_cast<std::uint32_t>(r["session_id"]));
            } else if (kind == kind::RuleRemove) {
                rules.erase(static_cast<std::uint32_t>(r["session_id"]));
            } else if (kind == kind::UeState && r.value("side", "") == "amf") {
                amf_state[r.value("supi", "")] = r.value("state", "");
            }
        }
        at_boundary(recs.size() - 1);
    }

    void check_registration_exchanges() {
        bool control_dropped = false;
        for (const auto& r : recs)
            if (kind_of(r) == kind::LinkDrop && r.value("plane", "") == "control") control_dropped = true;
        const bool strict = loss_prob == 0.0 && ue_retries == 0 && !control_dropped;

        static const char* expected[5] = {"RegistrationRequest", "AuthenticationRequest",
                                          "AuthenticationResponse", "RegistrationAccept",
                                          "RegistrationComplete"};
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            if (kind_of(r) != kind::ProcOutcome || r.value("proc", "") != "registration" ||
                r.value("outcome", "") != "ok")
                continue;
            const std::string supi = r.value("supi", "");
            const TimeUs start = r.value("start_us", TimeUs{0});
            const TimeUs end = r.value("t_us", TimeUs{0});
            std::vector<std::string> sent;
            for (std::size_t j = 0; j < i; ++j) {
                const auto& s = recs[j];
                if (kind_of(s) != kind::NasSend || s.value("supi", "") != supi) continue;
                const TimeUs t = s.value("t_us", TimeUs{0});
                if (t < start || t > end) continue;
                sent.push_back(s.value("msg_type", ""));
            }
            if (strict) {
                bool ok = sent.size() == 5;
                for (std::size_t k = 0; ok && k < 5; ++k) ok = sent[k] == expected[k];
                if (!ok)
                    violate("registration-five-crossings", {i},
                            "successful registration of " + supi + " shows " +
                                std::to_string(sent.size()) + " NAS sends (want the exact 5-message exchange)");
            } else {
                std::size_t k = 0;
                for (const auto& m : sent)
                    if (k < 5 && m == expected[k]) ++k;
                if (k != 5)
                    violate("registration-five-crossings", {i},
                            "registration of " + supi + " missing required steps in order");
            }
        }
    }

    void check_onboard_isolation() {
        std::map<std::uint64_t, std::size_t> classified_onboard;  // pkt_id -> classify index
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            if (kind_of(r) == kind::UserPktClassify && r.value("dn", "") == "onboard")
                classified_onboard[r["pkt_id"]] = i;
        }
        if (classified_onboard.empty()) return;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            const std::string kind = kind_of(r);
            if (kind != kind::LinkSend && kind != kind::LinkDeliver && kind != kind::LinkDrop &&
                kind != kind::LinkQueue)
                continue;
            if (!r.contains("pkt_id")) continue;
            auto it = classified_onboard.find(r["pkt_id"].get<std::uint64_t>());
            if (it != classified_onboard.end() && i > it->second)
                violate("onboard-isolation", {it->second, i},
                        "onboard-classified packet appeared on the satellite-ground link");
        }
    }

    void run() {
        load_meta();
        check_time_order();
        check_link();
        check_conservation();
        check_state_lag();
        check_smf_upf_agreement();
        check_registration_exchanges();
        check_onboard_isolation();
    }
};

}  // namespace

VerifyReport verify_trace(const std::string& jsonl) {
    VerifyReport report;
    std::vector<json> recs;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json r = json::parse(line, nullptr, false);
        if (r.is_discarded()) {
            report.malformed = true;
            report.malformed_reason = "line " + std::to_string(line_no) + " is not valid JSON";
            return report;
        }
        recs.push_back(std::move(r));
    }
    if (recs.empty() || recs[0].value("kind", "") != kind::RunMeta) {
        report.malformed = true;
        report.malformed_reason = "trace must start with a RunMeta record";
        return report;
    }
    Checker checker(recs);
    try {
        checker.run();
    } catch (const json::exception& e) {
        report.malformed = true;
        report.malformed_reason = std::string("record field missing or mistyped: ") + e.what();
        return report;
    }
    return checker.report;
}

VerifyReport verify_trace_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        VerifyReport report;
        report.malformed = true;
        report.malformed_reason = "cannot open trace file: " + path;
        return report;
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return verify_trace(buf.str());
}

}  // namespace orbit5gc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sys/wait.h>

#include "orbit5gc/nas.hpp"
#include "orbit5gc/ngap.hpp"
#include "orbit5gc/runner.hpp"
#include "orbit5gc/scenario.hpp"
#include "orbit5gc/verify.hpp"

using namespace orbit5gc;
using nlohmann::json;

namespace {

const std::string kRoot = ORBIT5GC_SOURCE_ROOT;

ScenarioConfig load(const std::string& name) {
    return load_scenario_file(kRoot + "/scenarios/" + name);
}

// Minimal scenario skeleton the tests specialize.
json base_scenario() {
    return json::parse(R"({
      "name": "inline",
      "seed": 5,
      "duration_s": 4.0,
      "processing_us": 500,
      "satlink": {
        "one_way_delay_us": 20000,
        "uplink_bps": 10000000,
        "downlink_bps": 50000000,
        "mtu": 1500
      },
      "data_networks": [
        {"name": "internet", "target": "ground"},
        {"name": "onboard", "target": "onboard"}
      ],
      "classifier": [
        {"prefix": "10.64.0.0/16", "target": "onboard"},
        {"prefix": "0.0.0.0/0", "target": "ground"}
      ],
      "gnbs": [{"id": 1, "location": "ground"}],
      "ues": [{"supi": "001010000000001", "key_hex": "00112233445566778899aabbccddeeff", "gnb": 1}],
      "timeline": []
    })");
}

const ProcedureResult* find_proc(const RunResult& r, const std::string& proc,
                                 const std::string& outcome = "ok") {
    for (const auto& p : r.procedures)
        if (p.proc == proc && p.outcome == outcome) return &p;
    return nullptr;
}

TimeUs wire_serialization(double bps, std::size_t nas_size) {
    return static_cast<TimeUs>(std::llround((nas_size + ngap::kHeaderBytes) * 8.0 * 1e6 / bps));
}

}  // namespace

TEST_CASE("scenario loader reports field-level diagnostics") {
    auto expect_error = [](json doc, const std::string& field_prefix) {
        try {
            parse_scenario(doc);
            FAIL_CHECK("expected ScenarioError for " << field_prefix);
        } catch (const ScenarioError& e) {
            CHECK(e.field().rfind(field_prefix, 0) == 0);
        }
    };

    auto doc = base_scenario();
    doc.erase("duration_s");
    expect_error(doc, "$.duration_s");

    doc = base_scenario();
    doc["satlink"]["loss_prob"] = 1.5;
    expect_error(doc, "$.satlink.loss_prob");

    doc = base_scenario();
    doc["ues"].push_back(doc["ues"][0]);
    expect_error(doc, "$.ues[1].supi");

    doc = base_scenario();
    doc["ues"][0]["gnb"] = 42;
    expect_error(doc, "$.ues[0].gnb");

    doc = base_scenario();
    doc["classifier"] = json::array({json{{"prefix", "10.0.0.0/8"}, {"target", "onboard"}}});
    expect_error(doc, "$.classifier");

    doc = base_scenario();
    doc["timeline"].push_back(
        json{{"at_s", 1.0}, {"ue", "001010000000001"}, {"action", "traffic"},
             {"dst", "8.8.8.8"}, {"count", 1}, {"size", 1500}});
    expect_error(doc, "$.timeline[0].size");

    doc = base_scenario();
    doc["timeline"].push_back(json{{"at_s", 9.5}, {"ue", "001010000000001"}, {"action", "register"}});
    expect_error(doc, "$.timeline[0].at_s");

    doc = base_scenario();
    doc["contact_windows"] = json::array({json{{"open_s", 2.0}, {"close_s", 1.0}}});
    expect_error(doc, "$.contact_windows[0]");
}

TEST_CASE("registration latency equals five crossings plus four processing delays exactly") {
    auto cfg = load("sat200ms.json");
    auto result = run_scenario(cfg);
    const auto* reg = find_proc(result, "registration");
    REQUIRE(reg != nullptr);

    // wire sizes of the five exchange messages, derived from the codec
    const auto supi = nas::Supi::parse("001010000000001").value();
    const std::size_t sz_request = nas::encode(nas::make_registration_request(supi)).value().size();
    std::vector<std::uint8_t> nonce(16, 0);
    const std::size_t sz_challenge =
        nas::encode(nas::make_authentication_request(nonce, 1)).value().size();
    std::vector<std::uint8_t> digest(32, 0);
    const std::size_t sz_response =
        nas::encode(nas::make_authentication_response(digest)).value().size();
    const std::size_t sz_accept = nas::encode(nas::make_registration_accept()).value().size();
    const std::size_t sz_complete = nas::encode(nas::make_registration_complete()).value().size();

    const auto& link = cfg.link;
    const TimeUs expected = 5 * link.one_way_delay_us +
                            wire_serialization(link.uplink_bps, sz_request) +
                            wire_serialization(link.downlink_bps, sz_challenge) +
                            wire_serialization(link.uplink_bps, sz_response) +
                            wire_serialization(link.downlink_bps, sz_accept) +
                            wire_serialization(link.uplink_bps, sz_complete) + 4 * cfg.processing_us;
    CHECK(reg->latency_ms == doctest::Approx(us_to_ms(expected)).epsilon(1e-12));

    // each request/response pair crosses twice plus one responder processing
    REQUIRE(reg->exchanges_ms.size() == 2);
    for (double exchange : reg->exchanges_ms) {
        CHECK(exchange > us_to_ms(2 * link.one_way_delay_us));
        CHECK(exchange < us_to_ms(2 * link.one_way_delay_us + cfg.processing_us + 2000));
    }

    const auto* session = find_proc(result, "session");
    REQUIRE(session != nullptr);
    CHECK(session->ue_ip == "10.45.0.2");
    CHECK(session->latency_ms > us_to_ms(2 * link.one_way_delay_us));
    CHECK(session->latency_ms < us_to_ms(2 * link.one_way_delay_us + cfg.processing_us + 2000));
}

TEST_CASE("idle scenario processes exactly the metrics ticks") {
    auto result = run_scenario(load("idle.json"));
    CHECK(result.events_processed == 10);
    CHECK(result.metrics.size() == 10);
    for (std::size_t i = 0; i < result.metrics.size(); ++i)
        CHECK(result.metrics[i].events_processed == i + 1);
}

TEST_CASE("metrics series has ceil(duration/cadence) rows") {
    auto doc = base_scenario();
    doc["duration_s"] = 2.5;
    auto result = run_scenario(parse_scenario(doc));
    REQUIRE(result.metrics.size() == 3);
    CHECK(result.metrics[0].t_s == doctest::Approx(1.0));
    CHECK(result.metrics[1].t_s == doctest::Approx(2.0));
    CHECK(result.metrics[2].t_s == doctest::Approx(2.5));
    const std::string csv = metrics_csv(result.metrics);
    CHECK(csv.find("t_s,events_processed,bytes_up") == 0);
}

TEST_CASE("simultaneous timeline actions execute in file order") {
    auto result = run_scenario(load("tiebreak.json"));
    std::vector<std::string> first_sends;
    std::istringstream in(result.trace_text);
    std::string line;
    while (std::getline(in, line) && first_sends.size() < 2) {
        auto r = json::parse(line);
        if (r.value("kind", "") == "NasSend") first_sends.push_back(r.value("supi", ""));
    }
    REQUIRE(first_sends.size() == 2);
    CHECK(first_sends[0] == "001010000000101");
    CHECK(first_sends[1] == "001010000000102");
}

TEST_CASE("equal seeds give byte-identical traces, different seeds differ, runs are thread-safe") {
    auto cfg = load("sat200ms.json");
    auto fut_a = std::async(std::launch::async, [&] { return run_scenario(cfg); });
    auto fut_b = std::async(std::launch::async, [&] { return run_scenario(cfg); });
    const auto a = fut_a.get();
    const auto b = fut_b.get();
    CHECK(a.trace_text == b.trace_text);
    CHECK(a.trace_hash == b.trace_hash);

    const auto c = run_scenario(cfg, std::uint64_t{777});
    CHECK(c.trace_hash != a.trace_hash);
}

TEST_CASE("shipped scenario traces verify clean") {
    for (const char* name : {"sat200ms.json", "idle.json", "onboard_offload.json", "tiebreak.json"}) {
        auto result = run_scenario(load(name));
        const auto report = verify_trace(result.trace_text);
        CHECK(!report.malformed);
        for (const auto& v : report.violations)
            FAIL_CHECK(name << ": " << v.invariant << " - " << v.detail);
    }
}

TEST_CASE("verify flags constructed violations") {
    auto result = run_scenario(load("sat200ms.json"));

    auto tamper = [&](auto mutate) {
        std::vector<json> recs;
        std::istringstream in(result.trace_text);
        std::string line;
        while (std::getline(in, line)) recs.push_back(json::parse(line));
        mutate(recs);
        std::string out;
        for (const auto& r : recs) out += r.dump() + "\n";
        return verify_trace(out);
    };

    auto has = [](const VerifyReport& report, const std::string& invariant) {
        for (const auto& v : report.violations)
            if (v.invariant == invariant) return true;
        return false;
    };

    SUBCASE("delivery moved before its send") {
        auto report = tamper([](std::vector<json>& recs) {
            for (auto& r : recs)
                if (r.value("kind", "") == "LinkDeliver") {
                    r["t_us"] = 0;
                    break;
                }
        });
        CHECK(has(report, "link-min-delay"));
    }

    SUBCASE("final counters disagree with the trace") {
        auto report = tamper([](std::vector<json>& recs) {
            for (auto& r : recs)
                if (r.value("kind", "") == "CountersFinal")
                    r["in_uplink"] = r["in_uplink"].get<std::uint64_t>() + 1;
        });
        CHECK(has(report, "counters-match-trace"));
    }

    SUBCASE("phantom UE registration") {
        auto report = tamper([](std::vector<json>& recs) {
            for (auto& r : recs)
                if (r.value("kind", "") == "UeState" && r.value("side", "") == "amf" &&
                    r.value("state", "") == "Registered") {
                    r["side"] = "ue";
                    break;
                }
        });
        CHECK(has(report, "ue-state-lag"));
    }

    SUBCASE("missing registration step") {
        auto report = tamper([](std::vector<json>& recs) {
            for (auto it = recs.begin(); it != recs.end(); ++it)
                if (it->value("kind", "") == "NasSend" &&
                    it->value("msg_type", "") == "AuthenticationResponse") {
                    recs.erase(it);
                    break;
                }
        });
        CHECK(has(report, "registration-five-crossings"));
    }

    SUBCASE("malformed json is reported as such") {
        auto report = verify_trace("{\"kind\":\"RunMeta\"}\nnot json\n");
        CHECK(report.malformed);
    }

    SUBCASE("missing meta is malformed") {
        auto report = verify_trace("{\"kind\":\"NasSend\"}\n");
        CHECK(report.malformed);
    }
}

TEST_CASE("contact-window outage queues traffic and verifies clean") {
    auto doc = base_scenario();
    doc["duration_s"] = 12.0;
    doc["contact_windows"] =
        json::array({json{{"open_s", 0.0}, {"close_s", 5.0}}, json{{"open_s", 8.0}, {"close_s", 60.0}}});
    doc["timeline"] = json::array(
        {json{{"at_s", 0.2}, {"ue", "001010000000001"}, {"action", "register"}},
         json{{"at_s", 1.5}, {"ue", "001010000000001"}, {"action", "session"}, {"dn", "internet"}},
         json{{"at_s", 6.0}, {"ue", "001010000000001"}, {"action", "traffic"}, {"dn", "internet"},
              {"dst", "8.8.8.8"}, {"count", 5}, {"size", 200}, {"interval_us", 1000}}});
    auto result = run_scenario(parse_scenario(doc));

    // all five packets were held by the outage and delivered after 8 s
    const auto* traffic = find_proc(result, "traffic");
    REQUIRE(traffic != nullptr);
    CHECK(traffic->delivered == 5);
    bool queued = false;
    std::istringstream in(result.trace_text);
    std::string line;
    while (std::getline(in, line)) {
        auto r = json::parse(line);
        if (r.value("kind", "") == "LinkQueue") queued = true;
        if (r.value("kind", "") == "UserPktDeliver") CHECK(r["t_us"].get<TimeUs>() >= 8'000'000);
    }
    CHECK(queued);
    CHECK(verify_trace(result.trace_text).clean());

    SUBCASE("drop policy discards the same packets") {
        doc["window_policy"] = "drop";
        doc["name"] = "inline-drop";
        auto dropped = run_scenario(parse_scenario(doc));
        const auto* t = find_proc(dropped, "traffic");
        REQUIRE(t != nullptr);
        CHECK(t->delivered == 0);
        CHECK(t->dropped == 5);
        CHECK(verify_trace(dropped.trace_text).clean());
    }
}

TEST_CASE("loss statistics: fixed seed reproduces the delivered count inside binomial bounds") {
    auto doc = base_scenario();
    doc["duration_s"] = 30.0;
    doc["satlink"]["one_way_delay_us"] = 1000;
    doc["satlink"]["loss_prob"] = 0.1;
    doc["ue_retries"] = 3;
    doc["timeline"] = json::array(
        {json{{"at_s", 0.2}, {"ue", "001010000000001"}, {"action", "register"}},
         json{{"at_s", 3.0}, {"ue", "001010000000001"}, {"action", "session"}, {"dn", "onboard"}},
         json{{"at_s", 6.0}, {"ue", "001010000000001"}, {"action", "traffic"}, {"dn", "onboard"},
              {"dst", "10.64.1.1"}, {"count", 100}, {"size", 300}, {"interval_us", 2000}}});
    auto first = run_scenario(parse_scenario(doc));
    const auto* traffic = find_proc(first, "traffic");
    REQUIRE(traffic != nullptr);
    CHECK(traffic->sent == 100);
    // P(delivered in [75, 97]) > 0.99 for Binomial(100, 0.9)
    CHECK(traffic->delivered >= 75);
    CHECK(traffic->delivered <= 97);

    auto second = run_scenario(parse_scenario(doc));
    const auto* again = find_proc(second, "traffic");
    REQUIRE(again != nullptr);
    CHECK(again->delivered == traffic->delivered);
    CHECK(second.trace_text == first.trace_text);
}

TEST_CASE("echo data network exercises the downlink tunnel path") {
    auto doc = base_scenario();
    doc["duration_s"] = 6.0;
    doc["data_networks"][0]["echo"] = true;
    doc["timeline"] = json::array(
        {json{{"at_s", 0.2}, {"ue", "001010000000001"}, {"action", "register"}},
         json{{"at_s", 1.5}, {"ue", "001010000000001"}, {"action", "session"}, {"dn", "internet"}},
         json{{"at_s", 3.0}, {"ue", "001010000000001"}, {"action", "traffic"}, {"dn", "internet"},
              {"dst", "8.8.8.8"}, {"count", 7}, {"size", 250}, {"interval_us", 5000}}});
    auto result = run_scenario(parse_scenario(doc));
    CHECK(result.counters.delivered_ground == 7);
    CHECK(result.counters.in_downlink == 7);
    CHECK(result.counters.delivered_ue == 7);
    CHECK(result.counters.conserved());
    CHECK(verify_trace(result.trace_text).clean());
}

TEST_CASE("re-registration over the full stack yields two clean registration outcomes") {
    auto doc = base_scenario();
    doc["duration_s"] = 6.0;
    doc["timeline"] = json::array(
        {json{{"at_s", 0.2}, {"ue", "001010000000001"}, {"action", "register"}},
         json{{"at_s", 2.0}, {"ue", "001010000000001"}, {"action", "session"}, {"dn", "internet"}},
         json{{"at_s", 3.5}, {"ue", "001010000000001"}, {"action", "register"}}});
    auto result = run_scenario(parse_scenario(doc));
    int ok_regs = 0;
    for (const auto& p : result.procedures)
        if (p.proc == "registration" && p.outcome == "ok") ++ok_regs;
    CHECK(ok_regs == 2);
    // the old session was torn down by the re-registration
    bool released = false;
    std::istringstream in(result.trace_text);
    std::string line;
    while (std::getline(in, line)) {
        auto r = json::parse(line);
        if (r.value("kind", "") == "SessionState" && r.value("state", "") == "Released") released = true;
    }
    CHECK(released);
    CHECK(verify_trace(result.trace_text).clean());
}

TEST_CASE("metrics counters are monotone where defined") {
    auto result = run_scenario(load("sat200ms.json"));
    REQUIRE(result.metrics.size() >= 2);
    for (std::size_t i = 1; i < result.metrics.size(); ++i) {
        const auto& prev = result.metrics[i - 1];
        const auto& cur = result.metrics[i];
        CHECK(cur.t_s > prev.t_s);
        CHECK(cur.events_processed >= prev.events_processed);
        CHECK(cur.bytes_up >= prev.bytes_up);
        CHECK(cur.bytes_down >= prev.bytes_down);
        CHECK(cur.pkt.in_uplink >= prev.pkt.in_uplink);
        CHECK(cur.pkt.delivered_ground >= prev.pkt.delivered_ground);
        CHECK(cur.pkt.dropped_link >= prev.pkt.dropped_link);
    }
}

TEST_CASE("verify_trace_file reads traces from disk") {
    auto result = run_scenario(load("sat200ms.json"));
    const std::string path = "harness_trace_tmp.jsonl";
    {
        std::ofstream f(path, std::ios::binary);
        f << result.trace_text;
    }
    CHECK(verify_trace_file(path).clean());
    CHECK(verify_trace_file("no/such/file.jsonl").malformed);
    std::remove(path.c_str());
}

#ifdef ORBIT5GC_CLI_PATH
TEST_CASE("cli honors ORBIT5GC_SEED, verifies traces and checks vectors") {
    const std::string cli = ORBIT5GC_CLI_PATH;
    const std::string scenario = kRoot + "/scenarios/sat200ms.json";
    auto sh = [](const std::string& cmd) { return std::system(cmd.c_str()); };

    REQUIRE(sh(cli + " run " + scenario + " --out cli_a --seed 5 > /dev/null") == 0);
    REQUIRE(sh("ORBIT5GC_SEED=5 " + cli + " run " + scenario + " --out cli_b > /dev/null") == 0);
    REQUIRE(sh(cli + " run " + scenario + " --out cli_c > /dev/null") == 0);

    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream buf;
        buf << f.rdbuf();
        return buf.str();
    };
    const std::string a = slurp("cli_a/trace.jsonl");
    CHECK(!a.empty());
    CHECK(a == slurp("cli_b/trace.jsonl"));       // env seed equals the flag seed
    CHECK(a != slurp("cli_c/trace.jsonl"));       // file seed (42) differs

    REQUIRE(sh("ORBIT5GC_SEED=9 " + cli + " run " + scenario + " --out cli_d --seed 5 > /dev/null") == 0);
    CHECK(a == slurp("cli_d/trace.jsonl"));       // the flag wins over the environment

    CHECK(sh(cli + " verify cli_a/trace.jsonl > /dev/null") == 0);
    CHECK(sh(cli + " codec-vectors " + kRoot + "/docs/conformance/nas_vectors.txt > /dev/null") == 0);
    // config errors exit with 2
    CHECK(WEXITSTATUS(sh(cli + " run no_such_scenario.json 2> /dev/null")) == 2);
    sh("rm -rf cli_a cli_b cli_c cli_d");
}
#endif

TEST_CASE("zero-delay link completes registration in processing time only") {
    auto doc = base_scenario();
    doc["satlink"]["one_way_delay_us"] = 0;
    doc["satlink"]["uplink_bps"] = 0;
    doc["satlink"]["downlink_bps"] = 0;
    doc["timeline"] =
        json::array({json{{"at_s", 0.5}, {"ue", "001010000000001"}, {"action", "register"}}});
    auto result = run_scenario(parse_scenario(doc));
    const auto* reg = find_proc(result, "registration");
    REQUIRE(reg != nullptr);
    CHECK(reg->latency_ms == doctest::Approx(4 * 0.5).epsilon(1e-12));  // 4 turnaround delays
}

TEST_CASE("session setup before registration is refused as NotRegistered") {
    auto doc = base_scenario();
    doc["timeline"] = json::array(
        {json{{"at_s", 0.5}, {"ue", "001010000000001"}, {"action", "session"}, {"dn", "internet"}}});
    auto result = run_scenario(parse_scenario(doc));
    const auto* rejected = find_proc(result, "session", "rejected");
    REQUIRE(rejected != nullptr);
    CHECK(rejected->cause == nas::cause::kNotRegistered);
    // nothing went on the air
    CHECK(result.bytes_up == 0);
    CHECK(verify_trace(result.trace_text).clean());
}

TEST_CASE("packets in flight when the rule is removed count as no-rule drops") {
    auto doc = base_scenario();
    doc["duration_s"] = 8.0;
    doc["satlink"]["one_way_delay_us"] = 100000;
    doc["timeline"] = json::array(
        {json{{"at_s", 0.2}, {"ue", "001010000000001"}, {"action", "register"}},
         json{{"at_s", 1.5}, {"ue", "001010000000001"}, {"action", "session"}, {"dn", "internet"}},
         // release goes out first; the burst follows while it is in flight
         json{{"at_s", 3.0}, {"ue", "001010000000001"}, {"action", "release"}, {"dn", "internet"}},
         json{{"at_s", 3.05}, {"ue", "001010000000001"}, {"action", "traffic"}, {"dn", "internet"},
              {"dst", "8.8.8.8"}, {"count", 4}, {"size", 200}, {"interval_us", 1000}}});
    auto result = run_scenario(parse_scenario(doc));
    // the rule is gone by the time the packets reach the UPF
    CHECK(result.counters.dropped_no_rule == 4);
    CHECK(result.counters.delivered_ground == 0);
    CHECK(result.counters.conserved());
    CHECK(verify_trace(result.trace_text).clean());
}

TEST_CASE("unreachable core times the registration out") {
    auto doc = base_scenario();
    doc["duration_s"] = 14.0;
    doc["registration_timeout_s"] = 5.0;
    // link closed for the whole run
    doc["contact_windows"] = json::array({json{{"open_s", 100.0}, {"close_s", 200.0}}});
    doc["timeline"] =
        json::array({json{{"at_s", 0.5}, {"ue", "001010000000001"}, {"action", "register"}}});
    auto result = run_scenario(parse_scenario(doc));
    const auto* reg = find_proc(result, "registration", "timeout");
    CHECK(reg != nullptr);
    CHECK(verify_trace(result.trace_text).clean());
}

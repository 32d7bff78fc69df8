// orbit5gc command line: scenario execution, trace verification, the
// transport handshake bench, codec conformance vectors and the
// fiber-vs-LEO latency comparison.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orbit5gc/nas.hpp"
#include "orbit5gc/runner.hpp"
#include "orbit5gc/satlink.hpp"
#include "orbit5gc/scenario.hpp"
#include "orbit5gc/transport_bench.hpp"
#include "orbit5gc/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("ORBIT5GC_SEED");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end && *end == '\0') return parsed;
    return std::nullopt;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed_flag,
            const std::string& out_dir, bool real_time) {
    orbit5gc::ScenarioConfig cfg;
    try {
        cfg = orbit5gc::load_scenario_file(scenario_path);
    } catch (const orbit5gc::ScenarioError& e) {
        std::cerr << "config error at " << e.field() << ": " << e.what() << "\n";
        return kExitConfig;
    }
    std::optional<std::uint64_t> seed = seed_flag ? seed_flag : env_seed();

    auto result = orbit5gc::run_scenario(cfg, seed, real_time);

    std::filesystem::create_directories(out_dir);
    const std::string trace_path = out_dir + "/trace.jsonl";
    const std::string metrics_path = out_dir + "/metrics.csv";
    const std::string summary_path = out_dir + "/summary.json";
    std::ofstream(trace_path, std::ios::binary) << result.trace_text;
    std::ofstream(metrics_path, std::ios::binary) << orbit5gc::metrics_csv(result.metrics);
    std::ofstream(summary_path, std::ios::binary) << result.summary().dump(2) << "\n";

    std::cout << result.summary().dump(2) << "\n";
    std::cout << "trace:   " << trace_path << "\n";
    std::cout << "metrics: " << metrics_path << "\n";

    const auto report = orbit5gc::verify_trace(result.trace_text);
    if (!report.clean()) {
        std::cerr << "invariant violations detected in the produced trace:\n";
        for (const auto& v : report.violations)
            std::cerr << "  " << v.invariant << ": " << v.detail << "\n";
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_verify(const std::string& trace_path) {
    const auto report = orbit5gc::verify_trace_file(trace_path);
    if (report.malformed) {
        std::cerr << "malformed trace: " << report.malformed_reason << "\n";
        return kExitConfig;
    }
    if (report.violations.empty()) {
        std::cout << "ok: no invariant violations\n";
        return kExitOk;
    }
    for (const auto& v : report.violations) {
        std::cout << v.invariant << ": " << v.detail << " (records";
        for (auto i : v.records) std::cout << " " << i;
        std::cout << ")\n";
    }
    std::cout << report.violations.size() << " violation(s)\n";
    return kExitViolation;
}

int cmd_bench(std::optional<std::int64_t> delay_us, std::optional<std::int64_t> proc_us, bool calibrate,
              double bps) {
    orbit5gc::LinkProfile profile;
    profile.uplink_bps = bps;
    profile.downlink_bps = bps;
    profile.mtu = 9000;

    orbit5gc::TimeUs d = 0, p = 0;
    if (calibrate) {
        const auto cal = orbit5gc::bench::calibrate_table1(profile);
        d = cal.one_way_delay_us;
        p = cal.processing_us;
        std::printf("calibrated to the measured table: one_way_delay_us=%lld processing_us=%lld\n",
                    static_cast<long long>(d), static_cast<long long>(p));
    }
    if (delay_us) d = *delay_us;
    if (proc_us) p = *proc_us;
    profile.one_way_delay_us = d;

    auto one = orbit5gc::bench::run_handshake(orbit5gc::bench::HandshakeScheme::one_rtt(), profile, p);
    auto two = orbit5gc::bench::run_handshake(orbit5gc::bench::HandshakeScheme::two_rtt(), profile, p);
    if (!one.ok() || !two.ok()) {
        std::cerr << "profile violates the bench preconditions (needs loss 0, jitter 0)\n";
        return kExitConfig;
    }
    std::printf("1-RTT scheme (delay %lld us, processing %lld us):\n", static_cast<long long>(d),
                static_cast<long long>(p));
    std::fputs(orbit5gc::bench::format_table(one.value()).c_str(), stdout);
    std::printf("connection established: %.2f ms, first payload: %.2f ms\n\n",
                one.value().connection_established_us / 1000.0, one.value().payload_us / 1000.0);
    std::printf("2-RTT baseline:\n");
    std::fputs(orbit5gc::bench::format_table(two.value()).c_str(), stdout);
    std::printf("connection established: %.2f ms\n\n", two.value().connection_established_us / 1000.0);
    std::printf("established-time ratio (2-RTT / 1-RTT): %.2f\n",
                static_cast<double>(two.value().connection_established_us) /
                    one.value().connection_established_us);
    return kExitOk;
}

int cmd_codec_vectors(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "cannot open vector file: " << path << "\n";
        return kExitConfig;
    }
    std::string line;
    std::size_t line_no = 0, checked = 0, failures = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            std::cerr << "line " << line_no << ": expected <hex>\\t<canonical text>\n";
            return kExitConfig;
        }
        const std::string hex = line.substr(0, tab);
        const std::string text = line.substr(tab + 1);
        auto bytes = orbit5gc::nas::from_hex(hex);
        auto msg = orbit5gc::nas::from_canonical_text(text);
        if (!bytes.ok() || !msg.ok()) {
            std::cerr << "line " << line_no << ": unparseable vector\n";
            return kExitConfig;
        }
        ++checked;
        bool ok = true;
        auto encoded = orbit5gc::nas::encode(msg.value());
        if (!encoded.ok() || encoded.value() != bytes.value()) ok = false;
        auto decoded = orbit5gc::nas::decode(bytes.value());
        if (!decoded.ok() || !(decoded.value() == msg.value())) ok = false;
        if (!ok) {
            ++failures;
            std::cout << "FAIL line " << line_no << ": " << text << "\n";
        }
    }
    std::cout << checked << " vectors, " << failures << " failures\n";
    return failures == 0 ? kExitOk : kExitViolation;
}

int cmd_compare_latency(double path_km, double altitude_km, double elevation_deg, int hops,
                        double stretch) {
    if (path_km <= 0 || hops < 2) {
        std::cerr << "need --path-km > 0 and --hops >= 2\n";
        return kExitConfig;
    }
    orbit5gc::OrbitGeometry geom{altitude_km, elevation_deg};
    const auto cmp = orbit5gc::compare_fiber_vs_leo(path_km, geom, hops, stretch);
    std::printf("ground great-circle: %.1f km (fiber path x%.2f stretch)\n", path_km, stretch);
    std::printf("slant range: %.2f km at %.1f deg elevation, %.0f km altitude\n",
                orbit5gc::slant_range_km(geom), elevation_deg, altitude_km);
    std::printf("fiber: %.1f us (%.2f ms)\n", cmp.fiber_us, cmp.fiber_us / 1000.0);
    std::printf("leo:   %.1f us (%.2f ms), %d hop(s)\n", cmp.leo_us, cmp.leo_us / 1000.0, hops);
    std::printf("improvement: %.3f\n", cmp.improvement);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbit5gc: desk-scale lightweight orbital 5G core over an emulated satellite link"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", trace_path, vector_path;
    std::optional<std::uint64_t> seed_flag;
    bool real_time = false;

    auto* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--seed", seed_flag, "override the scenario seed");
    run->add_option("--out", out_dir, "output directory (trace.jsonl, metrics.csv, summary.json)");
    run->add_flag("--real-time", real_time, "pace the event loop against the wall clock");

    auto* verify = app.add_subcommand("verify", "check a trace for invariant violations");
    verify->add_option("trace", trace_path, "trace.jsonl file")->required();

    std::optional<std::int64_t> delay_us, proc_us;
    bool calibrate = false;
    double bench_bps = 0.0;
    auto* bench = app.add_subcommand("bench-handshake", "1-RTT vs 2-RTT handshake timing");
    bench->add_option("--delay-us", delay_us, "one-way delay in microseconds");
    bench->add_option("--proc-us", proc_us, "per-packet processing in microseconds");
    bench->add_flag("--calibrate-table1", calibrate, "fit delay and processing to the measured table");
    bench->add_option("--bps", bench_bps, "serialization rate, 0 = none");

    auto* vectors = app.add_subcommand("codec-vectors", "check NAS conformance vectors");
    vectors->add_option("file", vector_path, "vector file (hex TAB canonical text)")->required();

    double path_km = 0, altitude_km = 550, elevation_deg = 90, stretch = orbit5gc::kDefaultFiberStretch;
    int hops = 2;
    auto* cmp = app.add_subcommand("compare-latency", "terrestrial fiber vs LEO path latency");
    cmp->add_option("--path-km", path_km, "ground great-circle distance")->required();
    cmp->add_option("--altitude-km", altitude_km, "satellite altitude");
    cmp->add_option("--elevation-deg", elevation_deg, "ground terminal elevation angle");
    cmp->add_option("--hops", hops, "satellite crossings (up + down)");
    cmp->add_option("--stretch", stretch, "fiber circuitousness factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(scenario_path, seed_flag, out_dir, real_time);
    if (verify->parsed()) return cmd_verify(trace_path);
    if (bench->parsed()) return cmd_bench(delay_us, proc_us, calibrate, bench_bps);
    if (vectors->parsed()) return cmd_codec_vectors(vector_path);
    if (cmp->parsed()) return cmd_compare_latency(path_km, altitude_km, elevation_deg, hops, stretch);
    return kExitConfig;
}

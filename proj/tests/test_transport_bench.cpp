#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbit5gc/transport_bench.hpp"

using namespace orbit5gc;
using namespace orbit5gc::bench;

namespace {

LinkProfile profile_for(TimeUs delay_us, double bps = 0.0) {
    LinkProfile p;
    p.one_way_delay_us = delay_us;
    p.uplink_bps = bps;
    p.downlink_bps = bps;
    p.mtu = 9000;
    return p;
}

}  // namespace

TEST_CASE("zero delay, zero processing, zero serialization collapses every row to zero") {
    auto trace = run_handshake(HandshakeScheme::one_rtt(), profile_for(0), 0);
    REQUIRE(trace.ok());
    for (const auto& row : trace.value().rows) CHECK(row.elapsed_us == 0);
    CHECK(trace.value().connection_established_us == 0);
}

TEST_CASE("crossing-count law: closed forms hold exactly on jitter-free profiles") {
    // serialization-free: r = (0, 2d+p, 2d+2p, 2d+3p)
    for (TimeUs d : {100, 5'000, 100'000})
        for (TimeUs p : {0, 490, 1'440}) {
            auto trace = run_handshake(HandshakeScheme::one_rtt(), profile_for(d), p);
            REQUIRE(trace.ok());
            const auto& rows = trace.value().rows;
            REQUIRE(rows.size() == 4);
            CHECK(rows[0].elapsed_us == 0);
            CHECK(rows[1].elapsed_us == 2 * d + p);
            CHECK(rows[2].elapsed_us == 2 * d + 2 * p);
            CHECK(rows[3].elapsed_us == 2 * d + 3 * p);
            CHECK(trace.value().connection_established_us == 2 * d + 2 * p);
            CHECK(trace.value().payload_us == 2 * d + 3 * p);
        }

    // with serialization: crossings x delay + serialization sum + processing sum
    const double bps = 1e7;
    auto ser = [&](int bytes) { return static_cast<TimeUs>(bytes * 8.0 * 1e6 / bps + 0.5); };
    const TimeUs d = 20'000, p = 300;
    auto trace = run_handshake(HandshakeScheme::one_rtt(), profile_for(d, bps), p);
    REQUIRE(trace.ok());
    CHECK(trace.value().connection_established_us == 2 * d + 2 * p + 2 * ser(1294));
    CHECK(trace.value().payload_us == 2 * d + 3 * p + 3 * ser(1294));

    auto two = run_handshake(HandshakeScheme::two_rtt(), profile_for(d, bps), p);
    REQUIRE(two.ok());
    CHECK(two.value().connection_established_us ==
          4 * d + 4 * p + ser(74) + ser(74) + ser(66) + ser(571) + ser(308));
}

TEST_CASE("trace is strictly monotone for positive delay and processing") {
    auto trace = run_handshake(HandshakeScheme::one_rtt(), profile_for(750), 300);
    REQUIRE(trace.ok());
    const auto& rows = trace.value().rows;
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].elapsed_us > rows[i - 1].elapsed_us);

    auto two = run_handshake(HandshakeScheme::two_rtt(), profile_for(750), 300);
    REQUIRE(two.ok());
    for (std::size_t i = 1; i < two.value().rows.size(); ++i)
        CHECK(two.value().rows[i].elapsed_us > two.value().rows[i - 1].elapsed_us);
}

TEST_CASE("one-rtt payload arrives after exactly four transmissions shaped like the table") {
    auto trace = run_handshake(HandshakeScheme::one_rtt(), profile_for(986), 490);
    REQUIRE(trace.ok());
    const auto& rows = trace.value().rows;
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].packet_type == "Initial");
    CHECK(rows[1].packet_type == "Handshake");
    CHECK(rows[2].packet_type == "Handshake");
    CHECK(rows[3].packet_type == "Protected Payload");
    CHECK(rows[0].length_bytes == 1294);
    CHECK(rows[1].length_bytes == 1294);
    CHECK(rows[2].length_bytes == 1294);
    CHECK(rows[3].length_bytes == 1504);
}

TEST_CASE("calibration reproduces measured rows 2 and 4 exactly and row 3 within 15 percent") {
    const LinkProfile profile = profile_for(0);
    const auto cal = calibrate_table1(profile);
    LinkProfile calibrated = profile;
    calibrated.one_way_delay_us = cal.one_way_delay_us;
    auto trace = run_handshake(HandshakeScheme::one_rtt(), calibrated, cal.processing_us);
    REQUIRE(trace.ok());
    const auto& rows = trace.value().rows;
    CHECK(rows[0].elapsed_us == 0);
    CHECK(rows[1].elapsed_us == kTable1Row2Us);
    CHECK(rows[3].elapsed_us == kTable1Row4Us);
    const double row3_err =
        std::abs(rows[2].elapsed_us - kTable1Row3Us) / static_cast<double>(kTable1Row3Us);
    CHECK(row3_err <= 0.15);
}

TEST_CASE("two-rtt baseline takes twice as long to establish") {
    SUBCASE("100 ms delay, zero processing") {
        auto cmp = compare_schemes(profile_for(100'000), 0);
        REQUIRE(cmp.ok());
        CHECK(cmp.value().one_rtt_ms == doctest::Approx(200.0));
        CHECK(cmp.value().two_rtt_ms == doctest::Approx(400.0));
        CHECK(cmp.value().ratio == doctest::Approx(2.0));
    }
    SUBCASE("zero delay leaves the processing-only ratio") {
        auto cmp = compare_schemes(profile_for(0), 500);
        REQUIRE(cmp.ok());
        CHECK(cmp.value().one_rtt_ms == doctest::Approx(1.0));
        CHECK(cmp.value().two_rtt_ms == doctest::Approx(2.0));
        CHECK(cmp.value().ratio == doctest::Approx(2.0));
    }
    SUBCASE("calibrated profile stays within the measured bracket") {
        const auto cal = calibrate_table1(profile_for(0));
        auto cmp = compare_schemes(profile_for(cal.one_way_delay_us), cal.processing_us);
        REQUIRE(cmp.ok());
        CHECK(cmp.value().ratio >= 1.8);
        CHECK(cmp.value().ratio <= 2.6);
        CHECK(cmp.value().two_rtt_ms > cmp.value().one_rtt_ms);
        CHECK(cmp.value().ratio >= 1.5);
    }
}

TEST_CASE("lossy or jittery profiles violate the bench precondition") {
    LinkProfile lossy = profile_for(1000);
    lossy.loss_prob = 0.01;
    CHECK(!run_handshake(HandshakeScheme::one_rtt(), lossy, 0).ok());
    CHECK(!compare_schemes(lossy, 0).ok());

    LinkProfile jittery = profile_for(1000);
    jittery.jitter_stddev_us = 5.0;
    CHECK(!run_handshake(HandshakeScheme::one_rtt(), jittery, 0).ok());
}

TEST_CASE("formatted table keeps the measured column order") {
    auto trace = run_handshake(HandshakeScheme::one_rtt(), profile_for(755), 1440);
    REQUIRE(trace.ok());
    const std::string table = format_table(trace.value());
    CHECK(table.find("Number") == 0);
    CHECK(table.find("Packet Type") != std::string::npos);
    CHECK(table.find("Elapsed Time(ms)") != std::string::npos);
    CHECK(table.find("Length(byte)") != std::string::npos);
    CHECK(table.find("2.95") != std::string::npos);
    CHECK(table.find("5.83") != std::string::npos);
}

#pragma once

#include <cstdint>
#include <string>

#include "orbit5gc/result.hpp"

namespace orbit5gc {

// Simulated clock, integer microseconds since run start.
using TimeUs = std::int64_t;

constexpr TimeUs seconds_us(double s) { return static_cast<TimeUs>(s * 1e6 + 0.5); }
inline double us_to_ms(TimeUs t) { return static_cast<double>(t) / 1000.0; }
inline double us_to_s(TimeUs t) { return static_cast<double>(t) / 1e6; }

enum class Ipv4Error { BadAddress, BadPrefix };

// IPv4 helpers over host-order u32. Enough for pools, rules and traces;
// no socket machinery involved.
Result<std::uint32_t, Ipv4Error> parse_ipv4(const std::string& dotted);
std::string format_ipv4(std::uint32_t addr);

struct Ipv4Cidr {
    std::uint32_t base = 0;  // network address, host order
    int prefix_len = 0;

    bool contains(std::uint32_t addr) const {
        if (prefix_len == 0) return true;
        const std::uint32_t mask = prefix_len >= 32 ? 0xFFFFFFFFu : ~((1u << (32 - prefix_len)) - 1u);
        return (addr & mask) == (base & mask);
    }
};

Result<Ipv4Cidr, Ipv4Error> parse_cidr(const std::string& text);
std::string format_cidr(const Ipv4Cidr& cidr);

}  // namespace orbit5gc

#include "orbit5gc/types.hpp"

#include <charconv>

namespace orbit5gc {

namespace {

bool parse_u32_field(const char* first, const char* last, std::uint32_t& out) {
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

Result<std::uint32_t, Ipv4Error> parse_ipv4(const std::string& dotted) {
    std::uint32_t octets[4];
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        std::size_t dot = i < 3 ? dotted.find('.', pos) : dotted.size();
        if (dot == std::string::npos || dot == pos) return Ipv4Error::BadAddress;
        if (!parse_u32_field(dotted.data() + pos, dotted.data() + dot, octets[i]) || octets[i] > 255)
            return Ipv4Error::BadAddress;
        pos = dot + 1;
    }
    return (octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3];
}

std::string format_ipv4(std::uint32_t addr) {
    return std::to_string((addr >> 24) & 0xFF) + "." + std::to_string((addr >> 16) & 0xFF) + "." +
           std::to_string((addr >> 8) & 0xFF) + "." + std::to_string(addr & 0xFF);
}

Result<Ipv4Cidr, Ipv4Error> parse_cidr(const std::string& text) {
    std::size_t slash = text.find('/');
    if (slash == std::string::npos) return Ipv4Error::BadPrefix;
    auto base = parse_ipv4(text.substr(0, slash));
    if (!base.ok()) return Ipv4Error::BadAddress;
    std::uint32_t len = 0;
    const char* first = text.data() + slash + 1;
    if (!parse_u32_field(first, text.data() + text.size(), len) || len > 32)
        return Ipv4Error::BadPrefix;
    Ipv4Cidr cidr{base.value(), static_cast<int>(len)};
    return cidr;
}

std::string format_cidr(const Ipv4Cidr& cidr) {
    return format_ipv4(cidr.base) + "/" + std::to_string(cidr.prefix_len);
}

}  // namespace orbit5gc

#include "orbit5gc/ngap.hpp"

namespace orbit5gc::ngap {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b) {
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | b[3];
}

}  // namespace

const char* procedure_name(Procedure p) {
    switch (p) {
        case Procedure::InitialUeMessage: return "InitialUeMessage";
        case Procedure::DownlinkNasTransport: return "DownlinkNasTransport";
        case Procedure::UplinkNasTransport: return "UplinkNasTransport";
        case Procedure::InitialContextSetup: return "InitialContextSetup";
    }
    return "?";
}

std::vector<std::uint8_t> encode(const NgapEnvelope& env) {
    std::vector<std::uint8_t> out;
    out.reserve(env.wire_size());
    out.push_back(static_cast<std::uint8_t>(env.procedure));
    put_u32(out, env.gnb_id);
    put_u32(out, env.ue_ran_id);
    out.push_back(static_cast<std::uint8_t>(env.nas_payload.size() >> 8));
    out.push_back(static_cast<std::uint8_t>(env.nas_payload.size() & 0xFF));
    out.insert(out.end(), env.nas_payload.begin(), env.nas_payload.end());
    return out;
}

Result<NgapEnvelope, NgapError> decode(std::span<const std::uint8_t> buf) {
    if (buf.size() < kHeaderBytes) return NgapError::Malformed;
    if (buf[0] < 1 || buf[0] > 4) return NgapError::Malformed;
    NgapEnvelope env;
    env.procedure = static_cast<Procedure>(buf[0]);
    env.gnb_id = get_u32(buf.subspan(1, 4));
    env.ue_ran_id = get_u32(buf.subspan(5, 4));
    const std::size_t len = (static_cast<std::size_t>(buf[9]) << 8) | buf[10];
    if (kHeaderBytes + len != buf.size()) return NgapError::Malformed;
    env.nas_payload.assign(buf.begin() + kHeaderBytes, buf.end());
    return env;
}

}  // namespace orbit5gc::ngap

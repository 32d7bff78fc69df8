#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orbit5gc/result.hpp"

namespace orbit5gc::ngap {

// N2-style transport framing between gNB and AMF:
//   procedure(1) | gnb_id(4 BE) | ue_ran_id(4 BE) | payload_len(2 BE) | payload
enum class Procedure : std::uint8_t {
    InitialUeMessage = 1,
    DownlinkNasTransport = 2,
    UplinkNasTransport = 3,
    InitialContextSetup = 4,
};

constexpr std::size_t kHeaderBytes = 11;

const char* procedure_name(Procedure p);

struct NgapEnvelope {
    Procedure procedure = Procedure::InitialUeMessage;
    std::uint32_t gnb_id = 0;
    std::uint32_t ue_ran_id = 0;
    std::vector<std::uint8_t> nas_payload;

    std::size_t wire_size() const { return kHeaderBytes + nas_payload.size(); }

    bool operator==(const NgapEnvelope&) const = default;
};

enum class NgapError { Malformed };

std::vector<std::uint8_t> encode(const NgapEnvelope& env);
Result<NgapEnvelope, NgapError> decode(std::span<const std::uint8_t> buf);

}  // namespace orbit5gc::ngap

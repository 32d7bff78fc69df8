#include "orbit5gc/nas.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace orbit5gc::nas {

namespace {

struct TypeInfo {
    MessageType type;
    const char* name;
    std::vector<std::uint8_t> mandatory;
};

const std::array<TypeInfo, kMessageTypeCount>& type_table() {
    static const std::array<TypeInfo, kMessageTypeCount> table = {{
        {MessageType::RegistrationRequest, "RegistrationRequest", {ie::kSupi}},
        {MessageType::AuthenticationRequest, "AuthenticationRequest", {ie::kAuthNonce, ie::kAuthSeq}},
        {MessageType::AuthenticationResponse, "AuthenticationResponse", {ie::kAuthDigest}},
        {MessageType::RegistrationAccept, "RegistrationAccept", {ie::kRegResult}},
        {MessageType::RegistrationComplete, "RegistrationComplete", {}},
        {MessageType::RegistrationReject, "RegistrationReject", {ie::kCause}},
        {MessageType::DeregistrationRequest, "DeregistrationRequest", {}},
        {MessageType::PduSessionEstablishmentRequest, "PduSessionEstablishmentRequest", {ie::kDnn, ie::kQosClass}},
        {MessageType::PduSessionEstablishmentAccept, "PduSessionEstablishmentAccept",
         {ie::kSessionId, ie::kUeIpv4, ie::kQosClass}},
        {MessageType::PduSessionEstablishmentReject, "PduSessionEstablishmentReject", {ie::kCause}},
        {MessageType::PduSessionReleaseRequest, "PduSessionReleaseRequest", {ie::kSessionId}},
        {MessageType::PduSessionReleaseComplete, "PduSessionReleaseComplete", {ie::kSessionId}},
    }};
    return table;
}

const TypeInfo& info_of(MessageType t) {
    return type_table()[static_cast<std::uint8_t>(t) - kFirstTypeCode];
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

const char* message_type_name(MessageType t) { return info_of(t).name; }

std::optional<MessageType> message_type_from_name(const std::string& name) {
    for (const auto& info : type_table())
        if (name == info.name) return info.type;
    return std::nullopt;
}

std::optional<MessageType> message_type_from_code(std::uint8_t code) {
    if (code < kFirstTypeCode || code > kLastTypeCode) return std::nullopt;
    return static_cast<MessageType>(code);
}

const InformationElement* NasMessage::find_ie(std::uint8_t tag) const {
    for (const auto& e : ies)
        if (e.tag == tag) return &e;
    return nullptr;
}

Result<Supi, Supi::Error> Supi::parse(const std::string& digits) {
    if (digits.size() != 15) return Error::BadLength;
    for (char c : digits)
        if (c < '0' || c > '9') return Error::BadDigit;
    return Supi(digits);
}

const char* encode_error_name(EncodeError e) {
    switch (e) {
        case EncodeError::IeTooLong: return "IeTooLong";
        case EncodeError::MessageTooLong: return "MessageTooLong";
        case EncodeError::DuplicateIeTag: return "DuplicateIeTag";
        case EncodeError::ReservedIeTag: return "ReservedIeTag";
        case EncodeError::MissingMandatoryIe: return "MissingMandatoryIe";
    }
    return "?";
}

const char* decode_error_name(DecodeError e) {
    switch (e) {
        case DecodeError::MalformedMessage: return "MalformedMessage";
        case DecodeError::MissingMandatoryIe: return "MissingMandatoryIe";
    }
    return "?";
}

std::span<const std::uint8_t> mandatory_ies(MessageType t) { return info_of(t).mandatory; }

Result<std::vector<std::uint8_t>, EncodeError> encode(const NasMessage& msg) {
    std::size_t total = kHeaderBytes;
    for (std::size_t i = 0; i < msg.ies.size(); ++i) {
        const auto& e = msg.ies[i];
        if (e.tag == ie::kReserved) return EncodeError::ReservedIeTag;
        if (e.value.size() > kMaxIeValueBytes) return EncodeError::IeTooLong;
        for (std::size_t j = 0; j < i; ++j)
            if (msg.ies[j].tag == e.tag) return EncodeError::DuplicateIeTag;
        total += 3 + e.value.size();
    }
    if (total > kMaxEncodedBytes) return EncodeError::MessageTooLong;
    for (std::uint8_t tag : mandatory_ies(msg.type))
        if (!msg.find_ie(tag)) return EncodeError::MissingMandatoryIe;

    std::vector<std::uint8_t> out;
    out.reserve(total);
    out.push_back(kProtocolDiscriminator);
    out.push_back(static_cast<std::uint8_t>(msg.type));
    for (const auto& e : msg.ies) {
        out.push_back(e.tag);
        out.push_back(static_cast<std::uint8_t>(e.value.size() >> 8));
        out.push_back(static_cast<std::uint8_t>(e.value.size() & 0xFF));
        out.insert(out.end(), e.value.begin(), e.value.end());
    }
    return out;
}

Result<NasMessage, DecodeError> decode(std::span<const std::uint8_t> buf) {
    if (buf.size() < kHeaderBytes || buf.size() > kMaxEncodedBytes)
        return DecodeError::MalformedMessage;
    if (buf[0] != kProtocolDiscriminator) return DecodeError::MalformedMessage;
    auto type = message_type_from_code(buf[1]);
    if (!type) return DecodeError::MalformedMessage;

    NasMessage msg;
    msg.type = *type;
    std::size_t pos = kHeaderBytes;
    while (pos < buf.size()) {
        if (pos + 3 > buf.size()) return DecodeError::MalformedMessage;
        const std::uint8_t tag = buf[pos];
        if (tag == ie::kReserved) return DecodeError::MalformedMessage;
        const std::size_t len = (static_cast<std::size_t>(buf[pos + 1]) << 8) | buf[pos + 2];
        pos += 3;
        if (pos + len > buf.size()) return DecodeError::MalformedMessage;
        for (const auto& seen : msg.ies)
            if (seen.tag == tag) return DecodeError::MalformedMessage;
        msg.ies.push_back({tag, {buf.begin() + pos, buf.begin() + pos + len}});
        pos += len;
    }
    for (std::uint8_t tag : mandatory_ies(msg.type))
        if (!msg.find_ie(tag)) return DecodeError::MissingMandatoryIe;
    return msg;
}

Result<std::size_t, DecodeError> encoded_length(std::span<const std::uint8_t> buf) {
    if (buf.size() < kHeaderBytes || buf[0] != kProtocolDiscriminator)
        return DecodeError::MalformedMessage;
    if (!message_type_from_code(buf[1])) return DecodeError::MalformedMessage;
    std::size_t pos = kHeaderBytes;
    while (pos < buf.size() && buf[pos] != kProtocolDiscriminator) {
        if (pos + 3 > buf.size()) return DecodeError::MalformedMessage;
        const std::size_t len = (static_cast<std::size_t>(buf[pos + 1]) << 8) | buf[pos + 2];
        pos += 3 + len;
        if (pos > buf.size()) return DecodeError::MalformedMessage;
    }
    return pos;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

Result<std::vector<std::uint8_t>, DecodeError> from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) return DecodeError::MalformedMessage;
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_nibble(hex[i]);
        const int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return DecodeError::MalformedMessage;
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string to_canonical_text(const NasMessage& msg) {
    std::string out = message_type_name(msg.type);
    for (const auto& e : msg.ies) {
        out += ' ';
        out += to_hex(std::span(&e.tag, 1));
        out += '=';
        out += to_hex(e.value);
    }
    return out;
}

Result<NasMessage, DecodeError> from_canonical_text(const std::string& text) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t sp = text.find(' ', pos);
        if (sp == std::string::npos) sp = text.size();
        if (sp > pos) fields.push_back(text.substr(pos, sp - pos));
        pos = sp + 1;
    }
    if (fields.empty()) return DecodeError::MalformedMessage;
    auto type = message_type_from_name(fields[0]);
    if (!type) return DecodeError::MalformedMessage;
    NasMessage msg;
    msg.type = *type;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const std::size_t eq = fields[i].find('=');
        if (eq == std::string::npos) return DecodeError::MalformedMessage;
        auto tag_bytes = from_hex(fields[i].substr(0, eq));
        if (!tag_bytes.ok() || tag_bytes.value().size() != 1) return DecodeError::MalformedMessage;
        auto value = from_hex(fields[i].substr(eq + 1));
        if (!value.ok()) return DecodeError::MalformedMessage;
        msg.ies.push_back({tag_bytes.value()[0], value.take()});
    }
    return msg;
}

std::uint32_t read_u32_be(std::span<const std::uint8_t> b) {
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | b[3];
}

std::vector<std::uint8_t> u32_be(std::uint32_t v) {
    return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
            static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

NasMessage make_registration_request(const Supi& supi, std::optional<std::uint8_t> slice_id) {
    NasMessage m{MessageType::RegistrationRequest, {}};
    m.ies.push_back({ie::kSupi, {supi.digits().begin(), supi.digits().end()}});
    if (slice_id) m.ies.push_back({ie::kSliceId, {*slice_id}});
    return m;
}

NasMessage make_authentication_request(std::span<const std::uint8_t> nonce, std::uint32_t seq) {
    NasMessage m{MessageType::AuthenticationRequest, {}};
    m.ies.push_back({ie::kAuthNonce, {nonce.begin(), nonce.end()}});
    m.ies.push_back({ie::kAuthSeq, u32_be(seq)});
    return m;
}

NasMessage make_authentication_response(std::span<const std::uint8_t> digest) {
    NasMessage m{MessageType::AuthenticationResponse, {}};
    m.ies.push_back({ie::kAuthDigest, {digest.begin(), digest.end()}});
    return m;
}

NasMessage make_registration_accept() {
    NasMessage m{MessageType::RegistrationAccept, {}};
    m.ies.push_back({ie::kRegResult, {0x01}});
    return m;
}

NasMessage make_registration_complete() { return {MessageType::RegistrationComplete, {}}; }

NasMessage make_registration_reject(std::uint8_t cause) {
    NasMessage m{MessageType::RegistrationReject, {}};
    m.ies.push_back({ie::kCause, {cause}});
    return m;
}

NasMessage make_deregistration_request() { return {MessageType::DeregistrationRequest, {}}; }

NasMessage make_session_request(const std::string& dnn, std::uint8_t qos) {
    NasMessage m{MessageType::PduSessionEstablishmentRequest, {}};
    m.ies.push_back({ie::kDnn, {dnn.begin(), dnn.end()}});
    m.ies.push_back({ie::kQosClass, {qos}});
    return m;
}

NasMessage make_session_accept(std::uint32_t session_id, std::uint32_t ue_ip, std::uint8_t qos,
                               std::optional<std::uint32_t> tunnel_id) {
    NasMessage m{MessageType::PduSessionEstablishmentAccept, {}};
    m.ies.push_back({ie::kSessionId, u32_be(session_id)});
    m.ies.push_back({ie::kUeIpv4, u32_be(ue_ip)});
    m.ies.push_back({ie::kQosClass, {qos}});
    if (tunnel_id) m.ies.push_back({ie::kTunnelId, u32_be(*tunnel_id)});
    return m;
}

NasMessage make_session_reject(std::uint8_t cause) {
    NasMessage m{MessageType::PduSessionEstablishmentReject, {}};
    m.ies.push_back({ie::kCause, {cause}});
    return m;
}

NasMessage make_session_release_request(std::uint32_t session_id) {
    NasMessage m{MessageType::PduSessionReleaseRequest, {}};
    m.ies.push_back({ie::kSessionId, u32_be(session_id)});
    return m;
}

NasMessage make_session_release_complete(std::uint32_t session_id) {
    NasMessage m{MessageType::PduSessionReleaseComplete, {}};
    m.ies.push_back({ie::kSessionId, u32_be(session_id)});
    return m;
}

}  // namespace orbit5gc::nas

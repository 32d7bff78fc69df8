#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orbit5gc/result.hpp"

namespace orbit5gc::nas {

// Wire layout: 0x7E protocol discriminator, one type-code byte, then a
// flat TLV list (tag 1 byte, length 2 bytes big-endian, value). Type
// codes run 0x41..0x4C in declaration order. Tag 0x7E is reserved so a
// frame walker can find message boundaries inside a byte stream; see
// docs/wire-formats.md for the normative tables.
constexpr std::uint8_t kProtocolDiscriminator = 0x7E;
constexpr std::size_t kHeaderBytes = 2;
constexpr std::size_t kMaxEncodedBytes = 65535;
constexpr std::size_t kMaxIeValueBytes = 65535;

enum class MessageType : std::uint8_t {
    RegistrationRequest = 0x41,
    AuthenticationRequest = 0x42,
    AuthenticationResponse = 0x43,
    RegistrationAccept = 0x44,
    RegistrationComplete = 0x45,
    RegistrationReject = 0x46,
    DeregistrationRequest = 0x47,
    PduSessionEstablishmentRequest = 0x48,
    PduSessionEstablishmentAccept = 0x49,
    PduSessionEstablishmentReject = 0x4A,
    PduSessionReleaseRequest = 0x4B,
    PduSessionReleaseComplete = 0x4C,
};

constexpr std::uint8_t kFirstTypeCode = 0x41;
constexpr std::uint8_t kLastTypeCode = 0x4C;
constexpr int kMessageTypeCount = 12;

const char* message_type_name(MessageType t);
std::optional<MessageType> message_type_from_name(const std::string& name);
std::optional<MessageType> message_type_from_code(std::uint8_t code);

// Information element tags used by the core message set.
namespace ie {
constexpr std::uint8_t kSupi = 0x01;       // 15 ASCII digits
constexpr std::uint8_t kAuthNonce = 0x02;  // 16 bytes
constexpr std::uint8_t kAuthSeq = 0x03;    // u32 big-endian
constexpr std::uint8_t kAuthDigest = 0x04; // 32 bytes
constexpr std::uint8_t kRegResult = 0x05;  // 1 byte
constexpr std::uint8_t kCause = 0x06;      // 1 byte
constexpr std::uint8_t kDnn = 0x07;        // ASCII data network name
constexpr std::uint8_t kSliceId = 0x08;    // 1 byte
constexpr std::uint8_t kQosClass = 0x09;   // 1 byte
constexpr std::uint8_t kSessionId = 0x0A;  // u32 big-endian
constexpr std::uint8_t kUeIpv4 = 0x0B;     // 4 bytes
constexpr std::uint8_t kTunnelId = 0x0C;   // u32 big-endian, N3 tunnel for the RAN leg
constexpr std::uint8_t kReserved = kProtocolDiscriminator;
}  // namespace ie

struct InformationElement {
    std::uint8_t tag = 0;
    std::vector<std::uint8_t> value;

    bool operator==(const InformationElement&) const = default;
};

struct NasMessage {
    MessageType type = MessageType::RegistrationRequest;
    std::vector<InformationElement> ies;

    bool operator==(const NasMessage&) const = default;

    const InformationElement* find_ie(std::uint8_t tag) const;
};

// Subscriber permanent identifier, 15 decimal digits. Default state is
// empty ("unset"); parse() is the only way to a populated value.
class Supi {
public:
    enum class Error { BadLength, BadDigit };

    Supi() = default;
    static Result<Supi, Error> parse(const std::string& digits);
    const std::string& digits() const { return digits_; }
    bool empty() const { return digits_.empty(); }

    auto operator<=>(const Supi&) const = default;

private:
    explicit Supi(std::string digits) : digits_(std::move(digits)) {}
    std::string digits_;
};

enum class EncodeError {
    IeTooLong,
    MessageTooLong,
    DuplicateIeTag,
    ReservedIeTag,
    MissingMandatoryIe,
};

enum class DecodeError {
    MalformedMessage,
    MissingMandatoryIe,
};

const char* encode_error_name(EncodeError e);
const char* decode_error_name(DecodeError e);

// Mandatory-IE table, mirrored by docs/nas-ie-tables.tsv.
std::span<const std::uint8_t> mandatory_ies(MessageType t);

Result<std::vector<std::uint8_t>, EncodeError> encode(const NasMessage& msg);
Result<NasMessage, DecodeError> decode(std::span<const std::uint8_t> buf);

// Length of the message starting at buf[0], for stream framing. Walks the
// TLV list until the buffer ends or the next discriminator byte appears at
// a TLV boundary.
Result<std::size_t, DecodeError> encoded_length(std::span<const std::uint8_t> buf);

// Canonical text form used by conformance vectors:
//   "<TypeName> <tag-hex>=<value-hex> ..."  (tags in wire order, lowercase hex)
std::string to_canonical_text(const NasMessage& msg);
Result<NasMessage, DecodeError> from_canonical_text(const std::string& text);

std::string to_hex(std::span<const std::uint8_t> bytes);
Result<std::vector<std::uint8_t>, DecodeError> from_hex(const std::string& hex);

// Convenience builders for the procedure set.
NasMessage make_registration_request(const Supi& supi, std::optional<std::uint8_t> slice_id = {});
NasMessage make_authentication_request(std::span<const std::uint8_t> nonce, std::uint32_t seq);
NasMessage make_authentication_response(std::span<const std::uint8_t> digest);
NasMessage make_registration_accept();
NasMessage make_registration_complete();
NasMessage make_registration_reject(std::uint8_t cause);
NasMessage make_deregistration_request();
NasMessage make_session_request(const std::string& dnn, std::uint8_t qos);
NasMessage make_session_accept(std::uint32_t session_id, std::uint32_t ue_ip, std::uint8_t qos,
                               std::optional<std::uint32_t> tunnel_id = {});
NasMessage make_session_reject(std::uint8_t cause);
NasMessage make_session_release_request(std::uint32_t session_id);
NasMessage make_session_release_complete(std::uint32_t session_id);

std::uint32_t read_u32_be(std::span<const std::uint8_t> b);
std::vector<std::uint8_t> u32_be(std::uint32_t v);

// Reject causes carried in the kCause IE.
namespace cause {
constexpr std::uint8_t kAuthFailure = 0x01;
constexpr std::uint8_t kUnknownSubscriber = 0x02;
constexpr std::uint8_t kNotRegistered = 0x03;
constexpr std::uint8_t kUnknownDataNetwork = 0x04;
constexpr std::uint8_t kPoolExhausted = 0x05;
}  // namespace cause

}  // namespace orbit5gc::nas

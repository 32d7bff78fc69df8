#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace orbit5gc::auth {

constexpr std::size_t kDigestBytes = 32;
constexpr std::size_t kNonceBytes = 16;

// Challenge-response digest: HMAC-SHA256 over the challenge bytes
// (nonce followed by the big-endian sequence counter) under the UE's
// preshared key. Deterministic; not a stand-in for 5G-AKA.
std::array<std::uint8_t, kDigestBytes> compute_auth_response(std::span<const std::uint8_t> key,
                                                             std::span<const std::uint8_t> challenge);

// nonce || seq_be32, the exact bytes both sides feed to the digest.
std::vector<std::uint8_t> auth_challenge_bytes(std::span<const std::uint8_t> nonce, std::uint32_t seq);

}  // namespace orbit5gc::auth

#include "orbit5gc/auth.hpp"

#include <cassert>

#include <openssl/evp.h>
#include <openssl/hmac.h>

namespace orbit5gc::auth {

std::array<std::uint8_t, kDigestBytes> compute_auth_response(std::span<const std::uint8_t> key,
                                                             std::span<const std::uint8_t> challenge) {
    assert(!key.empty() && !challenge.empty());
    std::array<std::uint8_t, kDigestBytes> out{};
    unsigned int out_len = 0;
    HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), challenge.data(), challenge.size(),
         out.data(), &out_len);
    assert(out_len == kDigestBytes);
    return out;
}

std::vector<std::uint8_t> auth_challenge_bytes(std::span<const std::uint8_t> nonce, std::uint32_t seq) {
    std::vector<std::uint8_t> bytes(nonce.begin(), nonce.end());
    bytes.push_back(static_cast<std::uint8_t>(seq >> 24));
    bytes.push_back(static_cast<std::uint8_t>(seq >> 16));
    bytes.push_back(static_cast<std::uint8_t>(seq >> 8));
    bytes.push_back(static_cast<std::uint8_t>(seq));
    return bytes;
}

}  // namespace orbit5gc::auth

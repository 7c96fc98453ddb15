#pragma once

#include <array>

#include <openssl/evp.h>

#include "wsnkm/bytes.hpp"

namespace wsnkm {

using Digest = std::array<uint8_t, 32>;

// One fixed 256-bit hash serves the whole library; callers separate roles
// with the domain tags below (one byte prepended to the input).
enum class DomainTag : uint8_t {
    H1 = 0x01,        // identity -> curve point
    H2 = 0x02,        // pairing value -> n-bit mask
    Kdf = 0x03,       // DH shared secret -> session key
    Stream = 0x04,    // session key -> keystream blocks
    Drbg = 0x05,      // deterministic random byte stream
    PairingAux = 0x06 // auxiliary divisor support in the pairing
};

inline Digest sha256(const Bytes& data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw CryptoError("sha256 failed");
    return out;
}

inline Bytes sha256_bytes(const Bytes& data) {
    Digest d = sha256(data);
    return Bytes(d.begin(), d.end());
}

inline Bytes tagged(DomainTag tag, const Bytes& data) {
    Bytes in;
    in.reserve(data.size() + 1);
    in.push_back(static_cast<uint8_t>(tag));
    append(in, data);
    return in;
}

inline Digest sha256_tagged(DomainTag tag, const Bytes& data) {
    return sha256(tagged(tag, data));
}

} // namespace wsnkm

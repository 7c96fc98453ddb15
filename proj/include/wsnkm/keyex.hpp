#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "wsnkm/drbg.hpp"
#include "wsnkm/errors.hpp"
#include "wsnkm/sha256.hpp"

// Diffie-Hellman negotiation over Z_q* and the hash-keystream cipher that
// carries all traffic once a session key exists.

namespace wsnkm::keyex {

struct DhGroup {
    mpz_class q;         // prime modulus
    mpz_class generator; // primitive root mod q
};

struct DhKeyPair {
    mpz_class x; // secret exponent, 1 <= x < q
    mpz_class y; // generator^x mod q
};

struct SessionKey {
    mpz_class raw;                   // the DH shared secret
    std::array<uint8_t, 32> derived; // KDF output, what the cipher uses
    uint32_t epoch = 0;
    Bytes id_lo, id_hi;              // the two peer ids, sorted

    bool same_key(const SessionKey& other) const { return derived == other.derived; }
};

namespace detail {

inline std::vector<mpz_class> prime_factors(mpz_class n) {
    std::vector<mpz_class> out;
    for (mpz_class f = 2; f * f <= n; f += (f == 2 ? 1 : 2)) {
        if (n % f == 0) {
            out.push_back(f);
            while (n % f == 0) n /= f;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline mpz_class powm(const mpz_class& base, const mpz_class& e, const mpz_class& m) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

} // namespace detail

// Smallest primitive root mod q, found by checking eta^((q-1)/f) != 1 for
// every prime factor f of q - 1.  Factoring is trial division, which is
// fine for the moduli this library runs at.
inline DhGroup make_group(const mpz_class& q) {
    if (q < 5 || mpz_probab_prime_p(q.get_mpz_t(), 40) == 0)
        throw ConfigError("make_group: q must be a prime >= 5");
    mpz_class order = q - 1;
    std::vector<mpz_class> factors = detail::prime_factors(order);
    for (mpz_class eta = 2; eta < q; ++eta) {
        bool primitive = true;
        for (const mpz_class& f : factors) {
            if (detail::powm(eta, order / f, q) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return DhGroup{q, eta};
    }
    throw ConfigError("make_group: no primitive root found");
}

inline DhKeyPair dh_generate(const DhGroup& group, Drbg& rng) {
    mpz_class x = rng.range(1, group.q - 1);
    return DhKeyPair{x, detail::powm(group.generator, x, group.q)};
}

// Y values that would collapse the shared secret; rejected before any key
// derivation on either side.
inline bool degenerate_parameter(const mpz_class& y, const DhGroup& group) {
    return y <= 1 || y >= group.q - 1;
}

inline SessionKey dh_shared(const DhKeyPair& own, const mpz_class& peer_y,
                            const DhGroup& group, const Bytes& id_a, const Bytes& id_b,
                            uint32_t epoch) {
    if (peer_y < 1 || peer_y >= group.q)
        throw CryptoError("dh_shared: peer parameter out of range");
    if (degenerate_parameter(peer_y, group))
        throw CryptoError("dh_shared: degenerate peer parameter");
    mpz_class k = detail::powm(peer_y, own.x, group.q);

    Bytes in;
    append_length_prefixed(in, mpz_to_bytes(k));
    const Bytes& lo = std::min(id_a, id_b);
    const Bytes& hi = std::max(id_a, id_b);
    append_length_prefixed(in, lo);
    append_length_prefixed(in, hi);
    append_be32(in, epoch);
    return SessionKey{k, sha256_tagged(DomainTag::Kdf, in), epoch, lo, hi};
}

// Keystream block i = hash(tag || key || nonce || i); XOR cipher, length
// preserving.  Confidentiality only -- no authenticity.
inline Bytes keystream_xor(const SessionKey& key, const Bytes& nonce, const Bytes& data) {
    if (nonce.size() != 12) throw CryptoError("keystream_xor: nonce must be 96 bits");
    Bytes out;
    out.reserve(data.size());
    uint32_t block = 0;
    size_t pos = 0;
    while (pos < data.size()) {
        Bytes in(key.derived.begin(), key.derived.end());
        append(in, nonce);
        append_be32(in, block++);
        Digest ks = sha256_tagged(DomainTag::Stream, in);
        for (size_t i = 0; i < ks.size() && pos < data.size(); ++i, ++pos)
            out.push_back(data[pos] ^ ks[i]);
    }
    return out;
}

inline Bytes sym_encrypt(const SessionKey& key, const Bytes& nonce, const Bytes& plaintext) {
    return keystream_xor(key, nonce, plaintext);
}

inline Bytes sym_decrypt(const SessionKey& key, const Bytes& nonce, const Bytes& ciphertext) {
    return keystream_xor(key, nonce, ciphertext);
}

// nonce(12) || ciphertext -- the on-wire frame for symmetric traffic.
inline Bytes seal_frame(const SessionKey& key, const Bytes& nonce, const Bytes& plaintext) {
    Bytes out = nonce;
    append(out, sym_encrypt(key, nonce, plaintext));
    return out;
}

inline Bytes open_frame(const SessionKey& key, const Bytes& frame) {
    if (frame.size() < 12) throw CryptoError("open_frame: frame too short");
    Bytes nonce(frame.begin(), frame.begin() + 12);
    Bytes ct(frame.begin() + 12, frame.end());
    return sym_decrypt(key, nonce, ct);
}

} // namespace wsnkm::keyex

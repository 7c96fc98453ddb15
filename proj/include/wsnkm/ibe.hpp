#pragma once

#include <string>

#include "wsnkm/drbg.hpp"
#include "wsnkm/pairing.hpp"

// Identity-based encryption: the four subsystems (setup, extract, encrypt,
// decrypt) plus the two hash functions H1 (identity -> subgroup point) and
// H2 (pairing value -> n-bit mask).

namespace wsnkm::ibe {

struct PublicParams {
    CurveContext curve;
    CurvePoint p_pub;   // s * P
    uint32_t n_bits;    // plaintext length, multiple of 8
    std::string hash_name = "sha256"; // pins the hash the vectors assume

    size_t n_bytes() const { return n_bits / 8; }

    // p || q || n || P || P_pub, each field 4-byte length prefixed.
    Bytes serialize() const {
        Bytes out;
        append_length_prefixed(out, mpz_to_bytes(curve.p));
        append_length_prefixed(out, mpz_to_bytes(curve.q));
        Bytes n;
        append_be32(n, n_bits);
        append_length_prefixed(out, n);
        append_length_prefixed(out, curve.generator.serialize());
        append_length_prefixed(out, p_pub.serialize());
        return out;
    }
};

struct MasterKey {
    mpz_class s; // in [1, q - 1]
};

struct PrivateKey {
    CurvePoint point; // s * H1(id)
    Bytes id;
};

struct Ciphertext {
    CurvePoint u;  // r * P
    Bytes v;       // m XOR H2(g^r), exactly n/8 bytes

    Bytes serialize() const {
        Bytes out = u.serialize();
        append(out, v);
        return out;
    }

    static Ciphertext deserialize(const Bytes& buf, const PublicParams& params) {
        ByteReader r(buf);
        CurvePoint u = deserialize_point(r, params.curve.p);
        Bytes v = r.take(params.n_bytes());
        if (!r.done()) throw CryptoError("Ciphertext: trailing bytes");
        return Ciphertext{u, v};
    }
};

// H1: try-and-increment.  hash(tag || id || counter) gives a candidate x
// and a sign bit for y; when x^3 + 1 is a square we lift to the curve and
// clear the cofactor.  Capped: exhausting the counter means broken params.
inline CurvePoint h1_map_to_point(const Bytes& id, const CurveContext& ctx) {
    for (uint32_t counter = 0; counter < 256; ++counter) {
        Bytes in = id;
        append_be32(in, counter);
        Digest d = sha256_tagged(DomainTag::H1, in);
        bool flip = (d[0] & 0x80) != 0;
        FieldElement x(mpz_from_bytes(Bytes(d.begin(), d.end())), ctx.p);
        auto y = field_sqrt(x * x * x + x.one_like());
        if (!y) continue;
        CurvePoint q = scalar_mul(ctx.cofactor, CurvePoint(x, flip ? -*y : *y));
        if (q.is_infinity()) continue;
        return q;
    }
    throw CryptoError("h1_map_to_point: no curve point after 256 attempts");
}

// H2: GF(p^2) -> {0,1}^n via counter-mode blocks of the canonical
// serialization; n = 256 is exactly one hash block.
inline Bytes h2_hash(const Fp2Element& g, uint32_t n_bits) {
    if (n_bits == 0 || n_bits % 8 != 0)
        throw ConfigError("h2_hash: n must be a positive multiple of 8");
    size_t want = n_bits / 8;
    Bytes ser = g.serialize();
    Bytes out;
    for (uint32_t block = 0; out.size() < want; ++block) {
        Bytes in = ser;
        append_be32(in, block);
        Digest d = sha256_tagged(DomainTag::H2, in);
        out.insert(out.end(), d.begin(), d.end());
    }
    out.resize(want);
    return out;
}

inline std::pair<PublicParams, MasterKey> setup(const mpz_class& p, const mpz_class& q,
                                                uint32_t n_bits = 256, uint64_t seed = 0) {
    if (n_bits == 0 || n_bits % 8 != 0)
        throw ConfigError("setup: n must be a positive multiple of 8");
    CurveContext curve = setup_curve(p, q, seed);
    Drbg rng = Drbg(seed).derive("ibe-master-key");
    mpz_class s = rng.range(1, q - 1);
    CurvePoint p_pub = scalar_mul(s, curve.generator);
    return {PublicParams{curve, p_pub, n_bits}, MasterKey{s}};
}

inline PrivateKey extract(const MasterKey& msk, const Bytes& id, const PublicParams& params) {
    CurvePoint q_id = h1_map_to_point(id, params.curve);
    return PrivateKey{scalar_mul(msk.s, q_id), id};
}

// Key sanity used by tests and by nodes installing delivered keys:
// e(K_id, P) = e(Q_id, P_pub).
inline bool key_matches(const PrivateKey& sk, const PublicParams& params) {
    CurvePoint q_id = h1_map_to_point(sk.id, params.curve);
    return modified_pairing(sk.point, params.curve.generator, params.curve) ==
           modified_pairing(q_id, params.p_pub, params.curve);
}

inline Bytes xor_bytes(const Bytes& a, const Bytes& b) {
    if (a.size() != b.size()) throw CryptoError("xor_bytes: length mismatch");
    Bytes out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

inline Ciphertext encrypt(const PublicParams& params, const Bytes& id, const Bytes& message,
                          Drbg& rng) {
    if (message.size() != params.n_bytes())
        throw CryptoError("encrypt: message must be exactly n bits");
    CurvePoint q_id = h1_map_to_point(id, params.curve);
    mpz_class r = rng.range(1, params.curve.q - 1);
    CurvePoint u = scalar_mul(r, params.curve.generator);
    Fp2Element g_id = modified_pairing(q_id, params.p_pub, params.curve);
    Bytes mask = h2_hash(g_id.pow(r), params.n_bits);
    return Ciphertext{u, xor_bytes(message, mask)};
}

inline Bytes decrypt(const PrivateKey& sk, const Ciphertext& ct, const PublicParams& params) {
    if (ct.v.size() != params.n_bytes())
        throw CryptoError("decrypt: ciphertext mask has wrong length");
    if (!params.curve.in_subgroup(ct.u))
        throw CryptoError("decrypt: U is not in the order-q subgroup");
    Bytes mask = h2_hash(modified_pairing(sk.point, ct.u, params.curve), params.n_bits);
    return xor_bytes(ct.v, mask);
}

} // namespace wsnkm::ibe

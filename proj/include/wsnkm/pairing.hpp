#pragma once

#include <gmpxx.h>

#include "wsnkm/algebra.hpp"
#include "wsnkm/sha256.hpp"

// Weil pairing of order q on E[q] via Miller's algorithm, evaluated as
// f_A(B) / f_B(A) on divisors A ~ (P) - (O), B ~ (Q) - (O) whose supports
// are shifted by auxiliary points, plus the cube-root distortion map that
// turns it into a pairing with both arguments over GF(p).

namespace wsnkm {

namespace detail {

// Signals a zero or pole hit during line evaluation; the caller re-draws
// the auxiliary support points and retries.
struct DegenerateSupport {};

inline Fp2Element nonzero(Fp2Element v) {
    if (v.is_zero()) throw DegenerateSupport{};
    return v;
}

// Line through u and w (tangent when u = w, vertical when w = -u),
// evaluated at the affine point t.
inline Fp2Element line_eval(const CurvePointExt& u, const CurvePointExt& w,
                            const CurvePointExt& t) {
    if (u.is_infinity() && w.is_infinity()) return t.x().one_like();
    if (u.is_infinity()) return nonzero(t.x() - w.x()); // vertical through w
    if (w.is_infinity()) return nonzero(t.x() - u.x());
    if (u.x() == w.x() && !(u.y() == w.y()))
        return nonzero(t.x() - u.x()); // chord through u, -u is vertical
    Fp2Element lambda = u.x().zero_like();
    if (u == w) {
        if (u.y().is_zero()) return nonzero(t.x() - u.x()); // vertical tangent
        Fp2Element xsq = u.x() * u.x();
        lambda = (xsq + xsq + xsq) / (u.y() + u.y());
    } else {
        lambda = (w.y() - u.y()) / (w.x() - u.x());
    }
    return nonzero(t.y() - u.y() - lambda * (t.x() - u.x()));
}

// Vertical line through w evaluated at t; the constant 1 when w = O.
inline Fp2Element vertical_eval(const CurvePointExt& w, const CurvePointExt& t) {
    if (w.is_infinity()) return t.x().one_like();
    return nonzero(t.x() - w.x());
}

// Miller loop for the function f with divisor q(base + off) - q(off),
// evaluated simultaneously at e1 and e2 (both affine, neither infinity).
// The translated start factor is f1 = vert_{base+off} / line_{base,off};
// each add step contributes one more f1 alongside the usual chord line.
inline std::pair<Fp2Element, Fp2Element> miller_eval(const CurvePointExt& base,
                                                     const CurvePointExt& off,
                                                     const mpz_class& q,
                                                     const CurvePointExt& e1,
                                                     const CurvePointExt& e2) {
    if (e1.is_infinity() || e2.is_infinity()) throw DegenerateSupport{};
    CurvePointExt shifted = point_add(base, off);
    Fp2Element f1_e1 = vertical_eval(shifted, e1) / line_eval(base, off, e1);
    Fp2Element f1_e2 = vertical_eval(shifted, e2) / line_eval(base, off, e2);

    Fp2Element acc1 = f1_e1;
    Fp2Element acc2 = f1_e2;
    CurvePointExt v = base;
    size_t nbits = mpz_sizeinbase(q.get_mpz_t(), 2);
    for (size_t i = nbits - 1; i-- > 0;) {
        CurvePointExt v2 = point_add(v, v);
        acc1 = acc1 * acc1 * line_eval(v, v, e1) / vertical_eval(v2, e1);
        acc2 = acc2 * acc2 * line_eval(v, v, e2) / vertical_eval(v2, e2);
        v = v2;
        if (mpz_tstbit(q.get_mpz_t(), i)) {
            CurvePointExt vp = point_add(v, base);
            acc1 = acc1 * f1_e1 * line_eval(v, base, e1) / vertical_eval(vp, e1);
            acc2 = acc2 * f1_e2 * line_eval(v, base, e2) / vertical_eval(vp, e2);
            v = vp;
        }
    }
    if (!v.is_infinity()) throw CryptoError("miller_eval: base point is not q-torsion");
    return {acc1, acc2};
}

// Auxiliary support points are drawn from a stream keyed by the pairing
// inputs and the attempt number, so the pairing stays a pure function.
inline CurvePointExt sample_support(Drbg& rng, const mpz_class& p) {
    for (int tries = 0; tries < 4096; ++tries) {
        FieldElement c0(rng.below(p), p);
        FieldElement c1(rng.below(p), p);
        Fp2Element x(c0, c1);
        bool flip = rng.next_bit();
        auto y = field_sqrt(x * x * x + x.one_like());
        if (!y) continue;
        return CurvePointExt(x, flip ? -*y : *y);
    }
    throw CryptoError("sample_support: exhausted candidates");
}

} // namespace detail

// Raw Weil pairing e_q(a, b) for q-torsion points with GF(p^2) coordinates.
// Alternating, bilinear, non-degenerate on E[q]; the value is independent
// of the auxiliary divisor supports, which are re-drawn on degeneracy up
// to a fixed retry budget.
inline Fp2Element weil_pairing(const CurvePointExt& a, const CurvePointExt& b,
                               const CurveContext& ctx) {
    if (!scalar_mul(ctx.q, a).is_infinity() || !scalar_mul(ctx.q, b).is_infinity())
        throw CryptoError("weil_pairing: input is not q-torsion");
    Fp2Element one = Fp2Element::one(ctx.p);
    if (a.is_infinity() || b.is_infinity()) return one;

    Bytes key;
    append(key, a.serialize());
    append(key, b.serialize());
    for (uint8_t attempt = 0; attempt < 8; ++attempt) {
        Bytes attempt_key = key;
        append_u8(attempt_key, attempt);
        Drbg rng(sha256_bytes(tagged(DomainTag::PairingAux, attempt_key)));
        try {
            CurvePointExt r1 = detail::sample_support(rng, ctx.p);
            CurvePointExt r2 = detail::sample_support(rng, ctx.p);
            // f_A on divisor (a + r1) - (r1), evaluated at B = (b + r2) - (r2).
            auto [fa_num, fa_den] =
                detail::miller_eval(a, r1, ctx.q, point_add(b, r2), r2);
            auto [fb_num, fb_den] =
                detail::miller_eval(b, r2, ctx.q, point_add(a, r1), r1);
            Fp2Element result = (fa_num * fb_den) / (fa_den * fb_num);
            if (result.is_zero()) continue;
            if (!(result.pow(ctx.q) == one)) continue; // degenerate support, retry
            return result;
        } catch (const detail::DegenerateSupport&) {
            continue;
        }
    }
    throw CryptoError("weil_pairing: retry budget exhausted");
}

// Cube-root-of-unity distortion map (x, y) -> (zeta x, y).  zeta is the
// lexicographically smallest primitive cube root of unity in GF(p^2); it
// exists because p = 2 (mod 3) keeps the cube roots out of GF(p).  Points
// with x = 0 (the 3-torsion) are fixed by the map.
inline Fp2Element primitive_cube_root(const mpz_class& p) {
    // zeta = (-1 +- sqrt(-3)) / 2; -3 is a non-residue mod p, so sqrt(-3)
    // is c1 * beta with c1 = sqrt(-3 / d) in GF(p).
    FieldElement d(detail::smallest_nonresidue(p), p);
    FieldElement minus3 = -(FieldElement::one(p) + FieldElement::one(p) + FieldElement::one(p));
    auto c1 = field_sqrt(minus3 / d);
    if (!c1) throw CryptoError("primitive_cube_root: -3/d is not a square");
    FieldElement half = (FieldElement::one(p) + FieldElement::one(p)).inverse();
    FieldElement c0 = -half;
    FieldElement c1half = *c1 * half;
    Fp2Element z1(c0, c1half);
    Fp2Element z2(c0, -c1half);
    Fp2Element zeta = (z1.c1().value() <= z2.c1().value()) ? z1 : z2;
    if (!(zeta * zeta * zeta == Fp2Element::one(p)) || zeta == Fp2Element::one(p))
        throw CryptoError("primitive_cube_root: verification failed");
    return zeta;
}

inline CurvePointExt distortion(const CurvePoint& pt) {
    if (pt.is_infinity()) return CurvePointExt::infinity();
    Fp2Element zeta = primitive_cube_root(pt.x().modulus());
    return CurvePointExt(zeta * Fp2Element::from_base(pt.x()),
                         Fp2Element::from_base(pt.y()));
}

// The pairing used by the encryption layer: both arguments in the order-q
// subgroup over GF(p); the second is pushed through the distortion map so
// the generator pairs non-trivially with itself (for q != 3).
inline Fp2Element modified_pairing(const CurvePoint& a, const CurvePoint& b,
                                   const CurveContext& ctx) {
    if (!ctx.in_subgroup(a) || !ctx.in_subgroup(b))
        throw CryptoError("modified_pairing: input is not in the order-q subgroup");
    return weil_pairing(embed(a), distortion(b), ctx);
}

} // namespace wsnkm

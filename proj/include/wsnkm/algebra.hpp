#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <utility>

#include <gmpxx.h>

#include "wsnkm/bytes.hpp"
#include "wsnkm/drbg.hpp"
#include "wsnkm/errors.hpp"

// Arbitrary-precision arithmetic over GF(p), GF(p^2) and the supersingular
// curve E: y^2 = x^3 + 1 with p prime, p = 2 (mod 3).  Affine coordinates
// only; every value is canonical and immutable after construction.

namespace wsnkm {

namespace detail {

inline mpz_class canonical_mod(const mpz_class& v, const mpz_class& p) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t()); // result in [0, p)
    return r;
}

inline bool is_probable_prime(const mpz_class& p) {
    return mpz_probab_prime_p(p.get_mpz_t(), 40) != 0;
}

// Smallest quadratic non-residue mod p, by ascending search from 2.
// Memoized: it is consulted by every GF(p^2) multiplication.
inline mpz_class smallest_nonresidue(const mpz_class& p) {
    static std::mutex mu;
    static std::map<mpz_class, mpz_class> cache;
    {
        std::scoped_lock lock(mu);
        auto it = cache.find(p);
        if (it != cache.end()) return it->second;
    }
    mpz_class d = 2;
    while (mpz_legendre(d.get_mpz_t(), p.get_mpz_t()) != -1) ++d;
    std::scoped_lock lock(mu);
    cache.emplace(p, d);
    return d;
}

} // namespace detail

// ---------------------------------------------------------------------------
// GF(p)

class FieldElement {
public:
    FieldElement(mpz_class value, mpz_class modulus)
        : p_(std::move(modulus)), v_(detail::canonical_mod(value, p_)) {
        if (p_ < 2) throw CryptoError("FieldElement: modulus must be >= 2");
    }

    static FieldElement zero(const mpz_class& p) { return FieldElement(0, p); }
    static FieldElement one(const mpz_class& p) { return FieldElement(1, p); }

    const mpz_class& value() const { return v_; }
    const mpz_class& modulus() const { return p_; }

    bool is_zero() const { return v_ == 0; }
    FieldElement zero_like() const { return FieldElement(0, p_); }
    FieldElement one_like() const { return FieldElement(1, p_); }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.p_ == b.p_ && a.v_ == b.v_;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return FieldElement(a.v_ + b.v_, a.p_);
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return FieldElement(a.v_ - b.v_, a.p_);
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return FieldElement(a.v_ * b.v_, a.p_);
    }
    FieldElement operator-() const { return FieldElement(-v_, p_); }

    FieldElement inverse() const {
        mpz_class r;
        if (mpz_invert(r.get_mpz_t(), v_.get_mpz_t(), p_.get_mpz_t()) == 0)
            throw CryptoError("FieldElement: division by zero");
        return FieldElement(r, p_);
    }

    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
        return a * b.inverse();
    }

    FieldElement pow(const mpz_class& e) const {
        if (e < 0) return inverse().pow(-e);
        mpz_class r;
        mpz_powm(r.get_mpz_t(), v_.get_mpz_t(), e.get_mpz_t(), p_.get_mpz_t());
        return FieldElement(r, p_);
    }

    // Legendre symbol: 1 square, -1 non-square, 0 zero.
    int legendre() const { return mpz_legendre(v_.get_mpz_t(), p_.get_mpz_t()); }

    Bytes serialize() const {
        return mpz_to_bytes_fixed(v_, byte_width(p_));
    }

    static size_t byte_width(const mpz_class& p) {
        return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8;
    }

private:
    void check_same(const FieldElement& other) const {
        if (p_ != other.p_) throw CryptoError("FieldElement: modulus mismatch");
    }

    mpz_class p_;
    mpz_class v_;
};

// ---------------------------------------------------------------------------
// GF(p^2) = GF(p)[beta] / (beta^2 - d), d the smallest non-residue mod p.

class Fp2Element {
public:
    Fp2Element(FieldElement c0, FieldElement c1) : c0_(std::move(c0)), c1_(std::move(c1)) {
        if (c0_.modulus() != c1_.modulus()) throw CryptoError("Fp2Element: modulus mismatch");
    }

    // Embed a base-field element as c0 + 0*beta.
    static Fp2Element from_base(const FieldElement& a) {
        return Fp2Element(a, a.zero_like());
    }
    static Fp2Element zero(const mpz_class& p) {
        return from_base(FieldElement::zero(p));
    }
    static Fp2Element one(const mpz_class& p) {
        return from_base(FieldElement::one(p));
    }

    const FieldElement& c0() const { return c0_; }
    const FieldElement& c1() const { return c1_; }
    const mpz_class& modulus() const { return c0_.modulus(); }

    bool is_zero() const { return c0_.is_zero() && c1_.is_zero(); }
    bool is_in_base_field() const { return c1_.is_zero(); }
    Fp2Element zero_like() const { return zero(modulus()); }
    Fp2Element one_like() const { return one(modulus()); }

    friend bool operator==(const Fp2Element& a, const Fp2Element& b) {
        return a.c0_ == b.c0_ && a.c1_ == b.c1_;
    }
    friend bool operator!=(const Fp2Element& a, const Fp2Element& b) { return !(a == b); }

    friend Fp2Element operator+(const Fp2Element& a, const Fp2Element& b) {
        return Fp2Element(a.c0_ + b.c0_, a.c1_ + b.c1_);
    }
    friend Fp2Element operator-(const Fp2Element& a, const Fp2Element& b) {
        return Fp2Element(a.c0_ - b.c0_, a.c1_ - b.c1_);
    }
    Fp2Element operator-() const { return Fp2Element(-c0_, -c1_); }

    // (a0 + a1 b)(b0 + b1 b) = a0 b0 + d a1 b1 + (a0 b1 + a1 b0) b,  b^2 = d.
    friend Fp2Element operator*(const Fp2Element& a, const Fp2Element& b) {
        if (a.modulus() != b.modulus()) throw CryptoError("Fp2Element: modulus mismatch");
        FieldElement d = a.nonresidue();
        return Fp2Element(a.c0_ * b.c0_ + d * (a.c1_ * b.c1_),
                          a.c0_ * b.c1_ + a.c1_ * b.c0_);
    }

    // Norm c0^2 - d c1^2 lands in GF(p); invert there.
    Fp2Element inverse() const {
        FieldElement d = nonresidue();
        FieldElement norm = c0_ * c0_ - d * (c1_ * c1_);
        if (norm.is_zero()) throw CryptoError("Fp2Element: division by zero");
        FieldElement ninv = norm.inverse();
        return Fp2Element(c0_ * ninv, -(c1_ * ninv));
    }

    friend Fp2Element operator/(const Fp2Element& a, const Fp2Element& b) {
        return a * b.inverse();
    }

    Fp2Element pow(const mpz_class& e) const {
        if (e < 0) return inverse().pow(-e);
        Fp2Element acc = one_like();
        size_t nbits = (e == 0) ? 0 : mpz_sizeinbase(e.get_mpz_t(), 2);
        for (size_t i = nbits; i-- > 0;) {
            acc = acc * acc;
            if (mpz_tstbit(e.get_mpz_t(), i)) acc = acc * *this;
        }
        return acc;
    }

    Bytes serialize() const {
        Bytes out = c0_.serialize();
        append(out, c1_.serialize());
        return out;
    }

private:
    FieldElement nonresidue() const {
        return FieldElement(detail::smallest_nonresidue(modulus()), modulus());
    }

    FieldElement c0_, c1_;
};

inline mpz_class field_order(const FieldElement& a) { return a.modulus(); }
inline mpz_class field_order(const Fp2Element& a) { return a.modulus() * a.modulus(); }

// ---------------------------------------------------------------------------
// Square roots.

namespace detail {

// Euler criterion over any finite field with known order.
template <typename F>
bool is_square(const F& a) {
    if (a.is_zero()) return true;
    mpz_class e = (field_order(a) - 1) / 2;
    return a.pow(e) == a.one_like();
}

// Deterministic enumeration of field elements, used to find a non-residue
// for Tonelli-Shanks.  For GF(p^2) the c1 = 0 slice is skipped: every
// base-field element is a square there.
inline FieldElement nth_candidate(uint64_t k, const FieldElement& like) {
    return FieldElement(mpz_class(2 + k), like.modulus());
}
inline Fp2Element nth_candidate(uint64_t k, const Fp2Element& like) {
    const mpz_class& p = like.modulus();
    mpz_class c0 = mpz_class(k) % p;
    mpz_class c1 = 1 + mpz_class(k) / p;
    return Fp2Element(FieldElement(c0, p), FieldElement(c1, p));
}

// Tonelli-Shanks, generic over the field; caller guarantees a is a square.
template <typename F>
F tonelli_shanks(const F& a) {
    mpz_class order_minus_1 = field_order(a) - 1;
    mpz_class t = order_minus_1;
    unsigned s = 0;
    while (mpz_even_p(t.get_mpz_t())) {
        t /= 2;
        ++s;
    }
    F z = a.one_like();
    for (uint64_t k = 0;; ++k) {
        z = nth_candidate(k, a);
        if (!z.is_zero() && !is_square(z)) break;
        if (k > 1u << 20) throw CryptoError("tonelli_shanks: no non-residue found");
    }
    F c = z.pow(t);
    F r = a.pow((t + 1) / 2);
    F u = a.pow(t);
    unsigned m = s;
    while (!(u == a.one_like())) {
        unsigned i = 0;
        F probe = u;
        while (!(probe == a.one_like())) {
            probe = probe * probe;
            if (++i == m) throw CryptoError("tonelli_shanks: input is not a square");
        }
        F b = c;
        for (unsigned j = 0; j + i + 1 < m; ++j) b = b * b;
        r = r * b;
        c = b * b;
        u = u * c;
        m = i;
    }
    return r;
}

} // namespace detail

// One square root of a, or nullopt if a is a non-square.  For GF(p) with
// p = 3 (mod 4) this is the direct a^((p+1)/4); otherwise Tonelli-Shanks.
template <typename F>
std::optional<F> field_sqrt(const F& a) {
    if (a.is_zero()) return a;
    if (!detail::is_square(a)) return std::nullopt;
    mpz_class order = field_order(a);
    F r = a.one_like();
    if (detail::canonical_mod(order, 4) == 3) {
        r = a.pow((order + 1) / 4);
    } else {
        r = detail::tonelli_shanks(a);
    }
    if (!(r * r == a)) throw CryptoError("field_sqrt: verification failed");
    return r;
}

// ---------------------------------------------------------------------------
// Points of E: y^2 = x^3 + 1, affine or the point at infinity.

template <typename F>
class Point {
public:
    Point() = default; // infinity

    Point(F x, F y) : coords_(std::in_place, std::move(x), std::move(y)) {
        const F& px = coords_->first;
        const F& py = coords_->second;
        if (!(py * py == px * px * px + px.one_like()))
            throw CryptoError("Point: not on curve y^2 = x^3 + 1");
    }

    static Point infinity() { return Point(); }

    bool is_infinity() const { return !coords_.has_value(); }
    const F& x() const { return require_affine().first; }
    const F& y() const { return require_affine().second; }

    friend bool operator==(const Point& a, const Point& b) {
        if (a.is_infinity() || b.is_infinity()) return a.is_infinity() == b.is_infinity();
        return a.x() == b.x() && a.y() == b.y();
    }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

    Point operator-() const {
        if (is_infinity()) return *this;
        return Point(x(), -y());
    }

    // 1-byte tag (0 infinity, 1 affine) followed by x || y.
    Bytes serialize() const {
        Bytes out;
        if (is_infinity()) {
            append_u8(out, 0);
            return out;
        }
        append_u8(out, 1);
        append(out, x().serialize());
        append(out, y().serialize());
        return out;
    }

private:
    const std::pair<F, F>& require_affine() const {
        if (!coords_) throw CryptoError("Point: infinity has no coordinates");
        return *coords_;
    }

    std::optional<std::pair<F, F>> coords_;
};

// Chord-and-tangent group law.
template <typename F>
Point<F> point_add(const Point<F>& a, const Point<F>& b) {
    if (a.is_infinity()) return b;
    if (b.is_infinity()) return a;
    const F &x1 = a.x(), &y1 = a.y(), &x2 = b.x(), &y2 = b.y();
    F lambda = x1.zero_like();
    if (x1 == x2) {
        if (y1 == -y2) return Point<F>::infinity(); // includes the y = 0 case
        // tangent: (3 x^2) / (2 y)
        F x1sq = x1 * x1;
        lambda = (x1sq + x1sq + x1sq) / (y1 + y1);
    } else {
        lambda = (y2 - y1) / (x2 - x1);
    }
    F x3 = lambda * lambda - x1 - x2;
    F y3 = lambda * (x1 - x3) - y1;
    return Point<F>(x3, y3);
}

template <typename F>
Point<F> operator+(const Point<F>& a, const Point<F>& b) {
    return point_add(a, b);
}

// Double-and-add; 0 * P = infinity, k >= 0.
template <typename F>
Point<F> scalar_mul(const mpz_class& k, const Point<F>& p) {
    if (k < 0) throw CryptoError("scalar_mul: negative scalar");
    Point<F> acc = Point<F>::infinity();
    size_t nbits = (k == 0) ? 0 : mpz_sizeinbase(k.get_mpz_t(), 2);
    for (size_t i = nbits; i-- > 0;) {
        acc = point_add(acc, acc);
        if (mpz_tstbit(k.get_mpz_t(), i)) acc = point_add(acc, p);
    }
    return acc;
}

using CurvePoint = Point<FieldElement>;
using CurvePointExt = Point<Fp2Element>;

inline CurvePointExt embed(const CurvePoint& p) {
    if (p.is_infinity()) return CurvePointExt::infinity();
    return CurvePointExt(Fp2Element::from_base(p.x()), Fp2Element::from_base(p.y()));
}

inline CurvePoint deserialize_point(ByteReader& r, const mpz_class& p) {
    uint8_t tag = r.u8();
    if (tag == 0) return CurvePoint::infinity();
    if (tag != 1) throw CryptoError("deserialize_point: bad tag");
    size_t w = FieldElement::byte_width(p);
    mpz_class xv = mpz_from_bytes(r.take(w));
    mpz_class yv = mpz_from_bytes(r.take(w));
    if (xv >= p || yv >= p) throw CryptoError("deserialize_point: coordinate out of range");
    return CurvePoint(FieldElement(xv, p), FieldElement(yv, p)); // rejects off-curve
}

inline CurvePoint deserialize_point(const Bytes& buf, const mpz_class& p) {
    ByteReader r(buf);
    CurvePoint pt = deserialize_point(r, p);
    if (!r.done()) throw CryptoError("deserialize_point: trailing bytes");
    return pt;
}

// ---------------------------------------------------------------------------
// Curve context: prime p = 2 (mod 3), subgroup order q | p + 1, generator.

struct CurveContext {
    mpz_class p;       // field prime
    mpz_class q;       // prime order of the working subgroup
    mpz_class cofactor; // (p + 1) / q
    CurvePoint generator;

    bool in_subgroup(const CurvePoint& pt) const {
        return scalar_mul(q, pt).is_infinity();
    }
};

namespace detail {

// Deterministically sample a point of E(GF(p)) from a byte stream:
// draw x until x^3 + 1 is a square, take y with the drawn sign bit.
inline CurvePoint sample_point(Drbg& rng, const mpz_class& p) {
    for (int tries = 0; tries < 4096; ++tries) {
        FieldElement x(rng.below(p), p);
        bool flip = rng.next_bit();
        auto y = field_sqrt(x * x * x + x.one_like());
        if (!y) continue;
        FieldElement ychosen = flip ? -*y : *y;
        return CurvePoint(x, ychosen);
    }
    throw CryptoError("sample_point: exhausted candidates");
}

} // namespace detail

// Build a curve context: validate (p, q), then walk seed-derived candidate
// points, clearing the cofactor until a nonzero subgroup point appears.
inline CurveContext setup_curve(const mpz_class& p, const mpz_class& q, uint64_t seed) {
    if (p < 5 || !detail::is_probable_prime(p))
        throw ConfigError("setup_curve: p must be a prime >= 5");
    if (detail::canonical_mod(p, 3) != 2)
        throw ConfigError("setup_curve: p must satisfy p = 2 (mod 3)");
    if (!detail::is_probable_prime(q))
        throw ConfigError("setup_curve: q must be prime");
    mpz_class group_order = p + 1;
    if (group_order % q != 0)
        throw ConfigError("setup_curve: q must divide p + 1");
    mpz_class h = group_order / q;

    Drbg rng = Drbg(seed).derive("curve-generator");
    for (int tries = 0; tries < 512; ++tries) {
        CurvePoint candidate = detail::sample_point(rng, p);
        CurvePoint gen = scalar_mul(h, candidate);
        if (gen.is_infinity()) continue;
        if (!scalar_mul(q, gen).is_infinity())
            throw CryptoError("setup_curve: cofactor-cleared point has wrong order");
        return CurveContext{p, q, h, gen};
    }
    throw CryptoError("setup_curve: exhausted candidate points");
}

} // namespace wsnkm

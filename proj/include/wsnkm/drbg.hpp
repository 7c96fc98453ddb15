#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "wsnkm/sha256.hpp"

namespace wsnkm {

// Deterministic random byte generator: block i = SHA-256(tag || seed || i).
// Every random choice in the library flows through an explicit Drbg, so a
// run is a pure function of its seeds.
class Drbg {
public:
    explicit Drbg(uint64_t seed) {
        append_be64(seed_, seed);
    }

    explicit Drbg(Bytes seed) : seed_(std::move(seed)) {}

    // Independent child stream; removing sibling streams never disturbs it.
    Drbg derive(const std::string& label) const {
        Bytes in = seed_;
        append(in, to_bytes(label));
        return Drbg(sha256_bytes(tagged(DomainTag::Drbg, in)));
    }

    uint8_t next_u8() {
        refill_if_needed();
        return block_[used_++];
    }

    Bytes next_bytes(size_t n) {
        Bytes out;
        out.reserve(n);
        for (size_t i = 0; i < n; ++i) out.push_back(next_u8());
        return out;
    }

    uint64_t next_u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | next_u8();
        return v;
    }

    bool next_bit() { return (next_u8() & 1) != 0; }

    // Uniform integer in [0, bound) by rejection sampling.
    mpz_class below(const mpz_class& bound) {
        if (bound <= 0) throw ConfigError("Drbg::below: bound must be positive");
        size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        size_t nbytes = (bits + 7) / 8;
        unsigned topbits = static_cast<unsigned>(bits - 8 * (nbytes - 1));
        uint8_t mask = topbits >= 8 ? 0xff : static_cast<uint8_t>((1u << topbits) - 1);
        for (;;) {
            Bytes raw = next_bytes(nbytes);
            raw[0] &= mask;
            mpz_class v = mpz_from_bytes(raw);
            if (v < bound) return v;
        }
    }

    // Uniform integer in [lo, hi] inclusive.
    mpz_class range(const mpz_class& lo, const mpz_class& hi) {
        if (lo > hi) throw ConfigError("Drbg::range: empty range");
        return lo + below(hi - lo + 1);
    }

    double unit_double() {
        // 53 random bits in [0, 1).
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

private:
    void refill_if_needed() {
        if (used_ < block_.size()) return;
        Bytes in = seed_;
        append_be64(in, counter_++);
        block_ = sha256_tagged(DomainTag::Drbg, in);
        used_ = 0;
    }

    Bytes seed_;
    Digest block_{};
    size_t used_ = block_.size();
    uint64_t counter_ = 0;
};

} // namespace wsnkm

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "wsnkm/errors.hpp"

namespace wsnkm {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

inline std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

inline Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw ConfigError("from_hex: odd-length string");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ConfigError("from_hex: bad digit");
    };
    Bytes out(s.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<uint8_t>(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
    return out;
}

inline void append(Bytes& out, const Bytes& b) {
    out.insert(out.end(), b.begin(), b.end());
}

inline void append_u8(Bytes& out, uint8_t v) { out.push_back(v); }

inline void append_be32(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void append_be64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

// Sequential reader over a byte buffer; every read checks bounds.
class ByteReader {
public:
    explicit ByteReader(const Bytes& buf) : buf_(buf) {}

    size_t remaining() const { return buf_.size() - pos_; }
    bool done() const { return pos_ == buf_.size(); }

    uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }

    uint32_t be32() {
        need(4);
        uint32_t v = (uint32_t(buf_[pos_]) << 24) | (uint32_t(buf_[pos_ + 1]) << 16) |
                     (uint32_t(buf_[pos_ + 2]) << 8) | uint32_t(buf_[pos_ + 3]);
        pos_ += 4;
        return v;
    }

    Bytes take(size_t n) {
        need(n);
        Bytes out(buf_.begin() + static_cast<long>(pos_), buf_.begin() + static_cast<long>(pos_ + n));
        pos_ += n;
        return out;
    }

    // 4-byte big-endian length followed by that many bytes.
    Bytes length_prefixed() {
        uint32_t n = be32();
        return take(n);
    }

private:
    void need(size_t n) const {
        if (buf_.size() - pos_ < n) throw CryptoError("truncated buffer");
    }
    const Bytes& buf_;
    size_t pos_ = 0;
};

inline void append_length_prefixed(Bytes& out, const Bytes& b) {
    append_be32(out, static_cast<uint32_t>(b.size()));
    append(out, b);
}

// Minimal big-endian magnitude of a non-negative integer (empty for zero).
inline Bytes mpz_to_bytes(const mpz_class& v) {
    if (sgn(v) < 0) throw CryptoError("mpz_to_bytes: negative value");
    if (v == 0) return {};
    size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    Bytes out(n);
    size_t written = 0;
    mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
    out.resize(written);
    return out;
}

// Big-endian, zero-padded on the left to exactly `width` bytes.
inline Bytes mpz_to_bytes_fixed(const mpz_class& v, size_t width) {
    Bytes mag = mpz_to_bytes(v);
    if (mag.size() > width) throw CryptoError("mpz_to_bytes_fixed: value too wide");
    Bytes out(width - mag.size(), 0);
    append(out, mag);
    return out;
}

inline mpz_class mpz_from_bytes(const Bytes& b) {
    mpz_class v = 0;
    if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    return v;
}

} // namespace wsnkm

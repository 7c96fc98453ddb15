#pragma once

#include <stdexcept>
#include <string>

namespace wsnkm {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters, malformed scenario files, impossible configurations.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Algebraic or cryptographic failure: modulus mismatch, off-curve point,
// malformed ciphertext, degenerate key-exchange parameter, and so on.
class CryptoError : public Error {
public:
    explicit CryptoError(const std::string& what) : Error(what) {}
};

// Simulation-level failure: unknown node id, empty subnet, bad event script.
class SimError : public Error {
public:
    explicit SimError(const std::string& what) : Error(what) {}
};

} // namespace wsnkm

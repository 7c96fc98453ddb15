#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wsnkm/errors.hpp"

// Closed-form overhead comparison of the hierarchical scheme against the
// two flat baselines: negotiation counts, per-primitive operation counts,
// and the MICA2 time/energy cost model.

namespace wsnkm::metrics {

enum class SchemeId { Proposed, IBEKAS, BnnIbsKs };

inline const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::Proposed: return "proposed";
        case SchemeId::IBEKAS: return "ibekas";
        case SchemeId::BnnIbsKs: return "bnn-ibs-ks";
    }
    throw ConfigError("scheme_name: bad scheme");
}

inline std::vector<SchemeId> all_schemes() {
    return {SchemeId::Proposed, SchemeId::IBEKAS, SchemeId::BnnIbsKs};
}

// MICA2 measurements (8-bit ATmega128L @ 8 MHz): one ECC multiplication
// and one bilinear pairing.
struct CostModel {
    double ecc_mul_s = 0.81;
    double ecc_mul_mj = 19.44;
    double pairing_s = 3.102;
    double pairing_mj = 74.45;
};

// One key-agreement round per head-peer pair: M members plus the base
// station.  The flat schemes pair every node with every neighbour.
inline uint64_t negotiation_counts(SchemeId scheme, uint64_t m, uint64_t n) {
    if (m < 1 || n < 1) throw ConfigError("negotiation_counts: M and N must be >= 1");
    switch (scheme) {
        case SchemeId::Proposed: return n * (m + 1);
        case SchemeId::IBEKAS:
        case SchemeId::BnnIbsKs: return n * (m * (m - 1) / 2);
    }
    throw ConfigError("negotiation_counts: bad scheme");
}

struct PrimitiveCounts {
    uint64_t bilinear = 0;
    uint64_t hash = 0;
    uint64_t ecc_add = 0;
    uint64_t ecc_mul = 0;
    uint64_t xor_op = 0;
    uint64_t exponent = 0;
};

// Per-scheme operation counts for a sub-network of M nodes.  The two
// phases are encryption/decryption for the encryption-based schemes and
// signature/validation for the signature-based one.
struct OperationCounts {
    std::string phase_a_label;
    std::string phase_b_label;
    PrimitiveCounts phase_a;
    PrimitiveCounts phase_b;
};

inline OperationCounts operation_counts(SchemeId scheme, uint64_t m) {
    if (m < 1) throw ConfigError("operation_counts: M must be >= 1");
    const uint64_t pairs = m * (m - 1) / 2;
    OperationCounts out;
    switch (scheme) {
        case SchemeId::Proposed:
            out.phase_a_label = "encryption";
            out.phase_b_label = "decryption";
            out.phase_a = PrimitiveCounts{m + 1, 2 * m + 2, m + 1, 0, m + 1, m + 1};
            out.phase_b = PrimitiveCounts{m + 1, m + 1, 0, 0, m + 1, 0};
            return out;
        case SchemeId::IBEKAS:
            out.phase_a_label = "encryption";
            out.phase_b_label = "decryption";
            out.phase_a = PrimitiveCounts{pairs, pairs, pairs, 0, pairs, pairs};
            out.phase_b = PrimitiveCounts{pairs, pairs, 0, 0, pairs, 0};
            return out;
        case SchemeId::BnnIbsKs:
            out.phase_a_label = "signature";
            out.phase_b_label = "validation";
            out.phase_a = PrimitiveCounts{0, pairs, pairs, 0, 0, 0};
            out.phase_b = PrimitiveCounts{0, 2 * pairs, 3 * pairs, 2 * pairs, 0, 0};
            return out;
    }
    throw ConfigError("operation_counts: bad scheme");
}

// Time/energy closed forms.  Only ECC multiplication and the pairing carry
// cost; the proposed scheme's published form scales with M (the M+1-based
// variant is available behind a flag).
struct TimeEnergy {
    double seconds = 0;
    double millijoules = 0;
};

inline TimeEnergy time_energy(SchemeId scheme, uint64_t m, const CostModel& model = {},
                              bool proposed_m_plus_one = false) {
    if (m < 1) throw ConfigError("time_energy: M must be >= 1");
    const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
    switch (scheme) {
        case SchemeId::Proposed: {
            double scale = proposed_m_plus_one ? static_cast<double>(m + 1)
                                               : static_cast<double>(m);
            return {(model.ecc_mul_s + model.pairing_s * 2) * scale,
                    (model.ecc_mul_mj + model.pairing_mj * 2) * scale};
        }
        case SchemeId::IBEKAS:
            return {(model.ecc_mul_s + model.pairing_s * 2) * pairs,
                    (model.ecc_mul_mj + model.pairing_mj * 2) * pairs};
        case SchemeId::BnnIbsKs:
            return {model.ecc_mul_s * (3 * pairs + 1), model.ecc_mul_mj * (3 * pairs + 1)};
    }
    throw ConfigError("time_energy: bad scheme");
}

// Cross-check input distilled from a simulation event log.
struct SimCrossCheck {
    std::vector<uint64_t> members_per_subnet; // actual M_i for each subnet
    uint64_t counted_negotiations = 0;        // negotiate events observed

    uint64_t closed_form_total() const {
        uint64_t total = 0;
        for (uint64_t m : members_per_subnet) total += m + 1;
        return total;
    }
};

// CSV: scheme,M,N,negotiations,time_s,energy_mJ[,counted_negotiations].
// Rows sorted by (scheme, M, N); floats fixed to 6 decimals.
inline void emit_report(std::vector<uint64_t> ms, std::vector<uint64_t> ns,
                        const std::vector<SchemeId>& schemes, std::ostream& out,
                        const CostModel& model = {},
                        const std::optional<SimCrossCheck>& sim = std::nullopt) {
    if (ms.empty() || ns.empty()) throw ConfigError("emit_report: empty M or N range");
    std::sort(ms.begin(), ms.end());
    std::sort(ns.begin(), ns.end());
    out << "scheme,M,N,negotiations,time_s,energy_mJ";
    if (sim) out << ",counted_negotiations";
    out << "\n";
    char buf[64];
    for (SchemeId scheme : schemes) {
        for (uint64_t m : ms) {
            for (uint64_t n : ns) {
                TimeEnergy te = time_energy(scheme, m, model);
                out << scheme_name(scheme) << ',' << m << ',' << n << ','
                    << negotiation_counts(scheme, m, n) << ',';
                std::snprintf(buf, sizeof buf, "%.6f,%.6f", te.seconds, te.millijoules);
                out << buf;
                if (sim) {
                    if (scheme == SchemeId::Proposed)
                        out << ',' << sim->counted_negotiations;
                    else
                        out << ',';
                }
                out << "\n";
            }
        }
    }
    if (!out) throw Error("emit_report: write failed");
}

} // namespace wsnkm::metrics

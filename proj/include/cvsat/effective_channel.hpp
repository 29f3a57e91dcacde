#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "cvsat/gaussian_core.hpp"
#include "cvsat/schemes.hpp"

namespace cvsat {

/// Lossy-TMSV description of an entangled standard-form CM: a TMSV with
/// cosh(2 r_e) = cosh_2r sent through pure-loss channels eta_a and eta_b.
struct EffectiveParams {
    double cosh_2r = 1.0;
    double eta_a = 1.0;
    double eta_b = 1.0;

    double r() const { return 0.5 * std::acosh(cosh_2r); }
};

/// Requires C = diag(c, -c) and c^2 > (a - 1)(b - 1). Throws NotEntangledError
/// for separable inputs, DomainError for the wrong correlation pattern.
EffectiveParams to_effective(const StandardFormCM& cm);

/// Non-throwing variant; nullopt for separable or non-standard CMs.
std::optional<EffectiveParams> try_effective(const TwoModeCM& cm);

/// Per-realization effective parameters of the swapped state (closed form in eta, eta').
/// cosh_2r has a pole on eta + eta' = 1; the transmissivities are bounded.
EffectiveParams swap_effective_realization(const Squeezing& sq, double eta, double eta_prime);

/// Channel-averaged effective parameters of a scheme.
struct EffectiveSummary {
    SchemeKind kind = SchemeKind::Direct;
    /// Absent when the averaging integral diverges (swap with eta0_AS + eta0_BS > 1).
    std::optional<double> cosh_2r;
    double eta_a = 1.0;
    double eta_b = 1.0;
    /// Probability of realizations whose effective transmissivities fall outside [0, 1].
    double out_of_range_mass = 0.0;
    std::string note;

    double eta_product() const { return eta_a * eta_b; }
};

EffectiveSummary scheme_effective_summary(SchemeKind kind, const Squeezing& sq, const FadingChannel& first,
                                          const FadingChannel& second, const QuadratureSpec& quad);
EffectiveSummary scheme_effective_summary(const SchemeConfig& cfg);

struct OrderingReport {
    EffectiveSummary direct;
    EffectiveSummary satellite;
    EffectiveSummary swap;
    bool swap_le_direct = false;
    bool satellite_ge_direct = false;
};

/// Compares total effective transmissivities of the three schemes. Violations
/// are reported in the flags, never thrown.
OrderingReport ordering_check(const LinkGeometry& geom, double beta, double w, const Squeezing& sq,
                              const QuadratureSpec& quad);

}  // namespace cvsat

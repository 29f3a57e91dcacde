#pragma once

#include "cvsat/fading_channel.hpp"
#include "cvsat/gaussian_core.hpp"
#include "cvsat/numerics.hpp"

namespace cvsat {

/// Keep a direct-transmission shot only when the measured combined
/// transmittance zeta = eta * eta' exceeds zeta_th.
struct ClassicalPsConfig {
    double zeta_th = 0.0;
};

/// Tap a fraction R = 1 - tap_t of mode B, homodyne its amplitude quadrature,
/// keep the shot when the outcome exceeds q_th.
struct QuantumPsConfig {
    double tap_t = 1.0;
    double q_th = 0.0;

    double reflectivity() const { return 1.0 - tap_t; }
    void validate() const;
};

struct PostSelectionResult {
    TwoModeCM cm;
    double p_success;
    double e_ln;
    double threshold;
};

/// Smallest P_s accepted before a selection region is declared empty.
inline constexpr double kMinSuccessProbability = 1e-12;

PostSelectionResult classical_postselect(const Squeezing& sq, const FadingChannel& uplink,
                                         const FadingChannel& downlink, const ClassicalPsConfig& cfg,
                                         const QuadratureSpec& quad);

/// Unnormalized first and second amplitude-quadrature moments of modes A and B'
/// over the accepted region q_t > q_th, for one channel realization, together
/// with the acceptance probability.
struct QuantumMoments {
    double mean_qa = 0.0;
    double mean_qb = 0.0;
    double second_qa = 0.0;
    double second_qb = 0.0;
    double cross_qab = 0.0;
    double p_accept = 0.0;
};

QuantumMoments quantum_moments_realization(const Squeezing& sq, double eta, double eta_prime,
                                           const QuantumPsConfig& cfg);

/// Channel averages of the realization moments (still unnormalized) plus the
/// acceptance-weighted averages of the phase-quadrature entries.
struct QuantumEnsembleMoments {
    QuantumMoments q;
    double weighted_bp = 0.0;  ///< E[P * (T b_p + R)]
    double weighted_cp = 0.0;  ///< E[P * sqrt(T) c_p]
};

QuantumEnsembleMoments quantum_ensemble_moments(const Squeezing& sq, const FadingChannel& uplink,
                                                const FadingChannel& downlink, const QuantumPsConfig& cfg,
                                                const QuadratureSpec& quad);

/// Assembles the distilled CM from ensemble moments. Throws NumericalError if P_s is negligible.
TwoModeCM distilled_cm(const Squeezing& sq, const QuantumEnsembleMoments& m);

PostSelectionResult quantum_postselect(const Squeezing& sq, const FadingChannel& uplink,
                                       const FadingChannel& downlink, const QuantumPsConfig& cfg,
                                       const QuadratureSpec& quad);

}  // namespace cvsat

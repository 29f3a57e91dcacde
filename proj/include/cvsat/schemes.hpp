#pragma once

#include <array>
#include <string_view>

#include "cvsat/fading_channel.hpp"
#include "cvsat/gaussian_core.hpp"
#include "cvsat/numerics.hpp"

namespace cvsat {

enum class SchemeKind {
    Direct,           ///< ground A -> satellite reflector -> ground B; links AS, SB
    SatelliteSource,  ///< TMSV generated on board; downlinks SA, SB
    Swap,             ///< Bell measurement on board; uplinks AS, BS
};

std::string_view to_string(SchemeKind kind);
/// Accepts "direct", "satellite", "swap". Throws DomainError otherwise.
SchemeKind parse_scheme_kind(std::string_view name);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::Direct;
    Squeezing squeezing = Squeezing::from_r(0.0);
    LinkGeometry geometry;
    double beta = 1.0;
    double w = 1.0;
    double chi = 0.0;
    QuadratureSpec quad;

    void validate() const;
};

/// The two channels a scheme uses, in (first mode, second mode) order.
std::array<FadingChannel, 2> scheme_links(SchemeKind kind, const LinkChannels& links);

struct SchemeResult {
    SchemeKind kind;
    TwoModeCM cm;
    double e_ln;
};

// --- direct transmission --------------------------------------------------

/// One realization with combined transmittance eta * eta_prime; chi on mode B.
TwoModeCM direct_realization(const Squeezing& sq, double eta, double eta_prime, double chi = 0.0);

TwoModeCM direct_ensemble(const Squeezing& sq, const FadingChannel& uplink, const FadingChannel& downlink,
                          double chi, const QuadratureSpec& quad);
TwoModeCM direct_ensemble(const SchemeConfig& cfg);

// --- satellite source -----------------------------------------------------

TwoModeCM satellite_realization(const Squeezing& sq, double eta, double eta_prime, double chi = 0.0);

TwoModeCM satellite_ensemble(const Squeezing& sq, const FadingChannel& down_a, const FadingChannel& down_b,
                             double chi, const QuadratureSpec& quad);
TwoModeCM satellite_ensemble(const SchemeConfig& cfg);

// --- entanglement swapping ------------------------------------------------

struct SwapGains {
    double g1 = 0.0;
    double g4 = 0.0;
};

/// Two zero-mean standard-form pairs: modes (1, 2) with blocks aI, bI,
/// diag(c_plus, c_minus) and modes (3, 4) with dI, eI, diag(f_plus, f_minus).
/// Modes 2 and 3 are the ones sent into the Bell measurement.
struct GeneralBipartiteInput {
    double a = 1.0;
    double b = 1.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
    double d = 1.0;
    double e = 1.0;
    double f_plus = 0.0;
    double f_minus = 0.0;

    TwoModeCM pair_12() const;
    TwoModeCM pair_34() const;
    /// Throws DomainError unless both pairs are physical.
    void validate() const;
};

/// CM of modes 1 and 4 conditioned on one Bell-measurement outcome.
TwoModeCM swap_conditional(const GeneralBipartiteInput& inp);

/// CM of modes 1 and 4 after gain-weighted displacement, averaged over all
/// Bell-measurement outcomes. Valid for arbitrary gains.
TwoModeCM swap_ensemble_cm(const GeneralBipartiteInput& inp, const SwapGains& gains);

/// Gains that null the outcome dependence of the displaced first moments.
/// Requires phase-independent correlations (c_minus = -c_plus, f_minus = -f_plus).
SwapGains optimal_gains(const GeneralBipartiteInput& inp);

/// The same gains written for two TMSV(v) pairs sent through uplinks eta, eta_prime.
SwapGains optimal_gains(double eta, double eta_prime, const Squeezing& sq);

/// Coefficients multiplying (q'_u, p'_v, q'_u, p'_v) in the displaced first
/// moments of (q1, p1, q4, p4), up to a common factor sqrt(2). Zero at the optimum.
std::array<double, 4> conditional_mean_residuals(const GeneralBipartiteInput& inp, const SwapGains& gains);

/// Inputs of the swap for one channel realization; chi is added to the
/// transmitted-mode block of each pair (mode 2 and mode 3).
GeneralBipartiteInput swap_input(const Squeezing& sq, double eta, double eta_prime, double chi = 0.0);

TwoModeCM swap_realization(const Squeezing& sq, double eta, double eta_prime, double chi = 0.0);

TwoModeCM swap_ensemble(const Squeezing& sq, const FadingChannel& uplink_a, const FadingChannel& uplink_b,
                        double chi, const QuadratureSpec& quad);
TwoModeCM swap_ensemble(const SchemeConfig& cfg);

// --- dispatch ---------------------------------------------------------------

TwoModeCM scheme_realization(SchemeKind kind, const Squeezing& sq, double eta, double eta_prime, double chi);

TwoModeCM scheme_ensemble(SchemeKind kind, const Squeezing& sq, const FadingChannel& first,
                          const FadingChannel& second, double chi, const QuadratureSpec& quad);

/// Runs the scheme selected by cfg.kind and evaluates E_LN.
SchemeResult evaluate_scheme(const SchemeConfig& cfg);

/// Monte Carlo estimate of every CM element of a scheme ensemble.
struct CmEstimate {
    Mat4 mean;
    Mat4 std_err;
};

CmEstimate scheme_ensemble_mc(SchemeKind kind, const Squeezing& sq, const FadingChannel& first,
                              const FadingChannel& second, double chi, const McSpec& mc);

}  // namespace cvsat

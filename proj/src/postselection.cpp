#include "cvsat/postselection.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cvsat/errors.hpp"

namespace cvsat {

namespace {

void require_transmittance(double eta, const char* name) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(eta));
    }
}

void require_success(double p_success, const char* context) {
    if (!(p_success >= kMinSuccessProbability)) {
        throw NumericalError(std::string(context) + ": success probability " + std::to_string(p_success) +
                             " is negligible, the selection region is empty");
    }
}

}  // namespace

// --- classical ------------------------------------------------------------------

PostSelectionResult classical_postselect(const Squeezing& sq, const FadingChannel& uplink,
                                         const FadingChannel& downlink, const ClassicalPsConfig& cfg,
                                         const QuadratureSpec& quad) {
    quad.validate();
    const double zeta_max = uplink.eta0() * downlink.eta0();
    if (!(cfg.zeta_th >= 0.0 && cfg.zeta_th < zeta_max)) {
        throw DomainError("zeta_th must lie in [0, " + std::to_string(zeta_max) + "), got " +
                          std::to_string(cfg.zeta_th));
    }
    const double v = sq.v();
    const double s = sq.correlation();
    double p_success = 0.0;
    double b = 0.0;
    double c = 0.0;
    for (const auto& x : uplink.rule(quad)) {
        if (cfg.zeta_th > 0.0 && !(x.x > 0.0)) {
            continue;
        }
        // Splitting the inner range at eta' = zeta_th / eta keeps every panel smooth.
        const auto inner = cfg.zeta_th > 0.0 ? downlink.rule_above(cfg.zeta_th / x.x, quad) : downlink.rule(quad);
        double p_row = 0.0;
        double b_row = 0.0;
        double c_row = 0.0;
        for (const auto& y : inner) {
            const double zeta = x.x * y.x;
            p_row += y.w;
            b_row += y.w * (1.0 + zeta * (v - 1.0));
            c_row += y.w * std::sqrt(zeta) * s;
        }
        p_success += x.w * p_row;
        b += x.w * b_row;
        c += x.w * c_row;
    }
    require_success(p_success, "classical_postselect");
    TwoModeCM cm = StandardFormCM{v, b / p_success, c / p_success, -c / p_success}.to_cm();
    cm.require_physical("classical post-selected CM");
    const double e_ln = log_negativity(cm);
    return {std::move(cm), std::min(p_success, 1.0), e_ln, cfg.zeta_th};
}

// --- quantum --------------------------------------------------------------------

void QuantumPsConfig::validate() const {
    if (!(tap_t > 0.0 && tap_t <= 1.0)) {
        throw DomainError("tap transmittivity T must lie in (0, 1], got " + std::to_string(tap_t));
    }
    if (std::isnan(q_th)) {
        throw DomainError("q_th must not be NaN");
    }
}

QuantumMoments quantum_moments_realization(const Squeezing& sq, double eta, double eta_prime,
                                           const QuantumPsConfig& cfg) {
    require_transmittance(eta, "eta");
    require_transmittance(eta_prime, "eta_prime");
    cfg.validate();
    const double t = cfg.tap_t;
    const double r = cfg.reflectivity();
    const double v = sq.v();
    const double zeta = eta * eta_prime;
    const double b_q = 1.0 + zeta * (v - 1.0);
    const double c_q = std::sqrt(zeta) * sq.correlation();
    const double var_t = r * b_q + t;

    // Gaussian tail pieces; both vanish at q_th = +-inf.
    double gauss = 0.0;
    double q_gauss = 0.0;
    if (std::isfinite(cfg.q_th)) {
        gauss = std::exp(-cfg.q_th * cfg.q_th / (2.0 * var_t)) / std::sqrt(2.0 * std::numbers::pi * var_t);
        q_gauss = cfg.q_th * gauss / var_t;
    }
    const double tail = erfc(cfg.q_th / std::sqrt(2.0 * var_t));

    QuantumMoments m;
    m.mean_qa = std::sqrt(r) * c_q * gauss;
    m.mean_qb = std::sqrt(t * r) * (b_q - 1.0) * gauss;
    m.second_qa = r * c_q * c_q * q_gauss + 0.5 * v * tail;
    m.second_qb = r * t * (b_q - 1.0) * (b_q - 1.0) * q_gauss +
                  (r * t * (b_q - 1.0) * (b_q - 1.0) + b_q) / (2.0 * var_t) * tail;
    m.cross_qab = std::sqrt(t) * r * (b_q - 1.0) * c_q * q_gauss + 0.5 * std::sqrt(t) * c_q * tail;
    m.p_accept = 0.5 * tail;
    return m;
}

QuantumEnsembleMoments quantum_ensemble_moments(const Squeezing& sq, const FadingChannel& uplink,
                                                const FadingChannel& downlink, const QuantumPsConfig& cfg,
                                                const QuadratureSpec& quad) {
    cfg.validate();
    quad.validate();
    const double t = cfg.tap_t;
    const double v = sq.v();
    const auto down = downlink.rule(quad);
    QuantumEnsembleMoments acc;
    for (const auto& x : uplink.rule(quad)) {
        for (const auto& y : down) {
            const double w = x.w * y.w;
            const auto m = quantum_moments_realization(sq, x.x, y.x, cfg);
            const double zeta = x.x * y.x;
            const double b_p = 1.0 + zeta * (v - 1.0);
            const double c_p = -std::sqrt(zeta) * sq.correlation();
            acc.q.mean_qa += w * m.mean_qa;
            acc.q.mean_qb += w * m.mean_qb;
            acc.q.second_qa += w * m.second_qa;
            acc.q.second_qb += w * m.second_qb;
            acc.q.cross_qab += w * m.cross_qab;
            acc.q.p_accept += w * m.p_accept;
            acc.weighted_bp += w * m.p_accept * (t * b_p + cfg.reflectivity());
            acc.weighted_cp += w * m.p_accept * std::sqrt(t) * c_p;
        }
    }
    return acc;
}

TwoModeCM distilled_cm(const Squeezing& sq, const QuantumEnsembleMoments& m) {
    const double p_s = m.q.p_accept;
    require_success(p_s, "quantum_postselect");
    const double mean_a = m.q.mean_qa / p_s;
    const double mean_b = m.q.mean_qb / p_s;
    Mat4 out = Mat4::Zero();
    out(0, 0) = m.q.second_qa / p_s - mean_a * mean_a;
    out(1, 1) = sq.v();
    out(2, 2) = m.q.second_qb / p_s - mean_b * mean_b;
    out(3, 3) = m.weighted_bp / p_s;
    // Covariance <qA qB'> - <qA><qB'>; the phase correlation is negative.
    out(0, 2) = out(2, 0) = m.q.cross_qab / p_s - mean_a * mean_b;
    out(1, 3) = out(3, 1) = m.weighted_cp / p_s;
    TwoModeCM cm(out);
    cm.require_physical("distilled CM");
    return cm;
}

PostSelectionResult quantum_postselect(const Squeezing& sq, const FadingChannel& uplink,
                                       const FadingChannel& downlink, const QuantumPsConfig& cfg,
                                       const QuadratureSpec& quad) {
    const auto moments = quantum_ensemble_moments(sq, uplink, downlink, cfg, quad);
    TwoModeCM cm = distilled_cm(sq, moments);
    const double e_ln = log_negativity(cm);
    return {std::move(cm), std::min(moments.q.p_accept, 1.0), e_ln, cfg.q_th};
}

}  // namespace cvsat

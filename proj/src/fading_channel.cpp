#include "cvsat/fading_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cvsat {

FadingChannel FadingChannel::beam_wander(double sigma_b, double beta, double w) {
    if (!(sigma_b >= 0.0) || !std::isfinite(sigma_b)) {
        throw DomainError("beam-wander sigma_b must be finite and >= 0, got " + std::to_string(sigma_b));
    }
    if (!(beta > 0.0) || !(w > 0.0)) {
        throw DomainError("aperture radius and beam-spot radius must be > 0");
    }
    FadingChannel ch;
    ch.sigma_b_ = sigma_b;
    ch.beta_ = beta;
    ch.w_ = w;
    ch.h_ = (beta / w) * (beta / w);

    const double x = 4.0 * ch.h_;
    if (x > 600.0) {
        throw DomainError("beta / w too large for the beam-wander parametrization");
    }
    const double scaled_i0 = std::exp(-x) * bessel_i(0, x);
    const double scaled_i1 = std::exp(-x) * bessel_i(1, x);
    const double spread = 1.0 - scaled_i0;
    if (!(spread > 1e-14)) {
        throw NumericalError("degenerate beam geometry: 1 - exp(-4h) I0(4h) vanishes");
    }
    ch.eta0_ = std::sqrt(-std::expm1(-2.0 * ch.h_));
    const double log_term = std::log(2.0 * ch.eta0_ * ch.eta0_ / spread);
    if (!(log_term > 0.0)) {
        throw NumericalError("degenerate beam geometry: non-positive scale logarithm");
    }
    ch.lambda_ = 8.0 * ch.h_ * scaled_i1 / spread / log_term;
    ch.l_scale_ = beta * std::pow(log_term, -1.0 / ch.lambda_);
    return ch;
}

double FadingChannel::pdf(double eta) const {
    if (is_point_mass() || !(eta > 0.0) || !(eta < eta0_)) {
        return 0.0;
    }
    const double t = 2.0 * std::log(eta0_ / eta);
    const double s2 = sigma_b_ * sigma_b_;
    const double l2 = l_scale_ * l_scale_;
    return 2.0 * l2 / (s2 * lambda_ * eta) * std::pow(t, 2.0 / lambda_ - 1.0) *
           std::exp(-l2 / (2.0 * s2) * std::pow(t, 2.0 / lambda_));
}

double FadingChannel::cdf(double eta) const {
    if (eta >= eta0_) {
        return 1.0;
    }
    if (is_point_mass() || !(eta > 0.0)) {
        return 0.0;
    }
    const double d = deflection_for(eta);
    return std::exp(-d * d / (2.0 * sigma_b_ * sigma_b_));
}

double FadingChannel::transmittance_at(double deflection) const {
    return eta0_ * std::exp(-0.5 * std::pow(deflection / l_scale_, lambda_));
}

double FadingChannel::deflection_for(double eta) const {
    if (!(eta > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    if (eta >= eta0_) {
        return 0.0;
    }
    return l_scale_ * std::pow(2.0 * std::log(eta0_ / eta), 1.0 / lambda_);
}

double FadingChannel::sample(Rng& rng) const {
    if (is_point_mass()) {
        throw DomainError("cannot sample a point-mass channel (sigma_b = 0); its transmittance is eta0");
    }
    const double d = sigma_b_ * std::sqrt(-2.0 * std::log(rng.uniform_pos()));
    return transmittance_at(d);
}

int FadingChannel::panel_count(const QuadratureSpec& spec) const {
    const double by_scale = std::ceil(deflection_cutoff() / l_scale_);
    return std::max(spec.subdivisions, static_cast<int>(by_scale));
}

std::vector<WeightedNode> FadingChannel::rule_on(double d_max, const QuadratureSpec& spec) const {
    const double cutoff = deflection_cutoff();
    const int panels =
        std::max(1, static_cast<int>(std::ceil(panel_count(spec) * std::min(1.0, d_max / cutoff) - 1e-12)));
    auto nodes = composite_rule(0.0, d_max, panels, spec.nodes_1d);
    const double s2 = sigma_b_ * sigma_b_;
    for (auto& node : nodes) {
        const double d = node.x;
        node.w *= d / s2 * std::exp(-d * d / (2.0 * s2));
        node.x = transmittance_at(d);
    }
    return nodes;
}

std::vector<WeightedNode> FadingChannel::rule(const QuadratureSpec& spec) const {
    if (is_point_mass()) {
        return {{eta0_, 1.0}};
    }
    return rule_on(deflection_cutoff(), spec);
}

std::vector<WeightedNode> FadingChannel::rule_above(double eta_min, const QuadratureSpec& spec) const {
    if (!(eta_min < eta0_)) {
        return {};
    }
    if (is_point_mass()) {
        return {{eta0_, 1.0}};
    }
    const double d_max = std::min(deflection_for(eta_min), deflection_cutoff());
    return rule_on(d_max, spec);
}

double FadingChannel::mean_transmittance(const QuadratureSpec& spec) const {
    return expectation([](double eta) { return eta; }, spec);
}

double FadingChannel::loss_db(const QuadratureSpec& spec) const {
    return -10.0 * std::log10(expectation([](double eta) { return eta * eta; }, spec));
}

void LinkGeometry::validate() const {
    if (!(sigma_b >= 0.0) || !std::isfinite(sigma_b)) {
        throw DomainError("sigma_b must be finite and >= 0");
    }
    if (!(k1 >= 0.0 && k1 <= 1.0)) {
        throw DomainError("k1 must lie in [0, 1], got " + std::to_string(k1));
    }
    if (!(k2 >= 0.0) || !std::isfinite(k2)) {
        throw DomainError("k2 must be finite and >= 0, got " + std::to_string(k2));
    }
}

LinkChannels expand_links(const LinkGeometry& geom, double beta, double w) {
    geom.validate();
    return {FadingChannel::beam_wander(geom.sigma_as(), beta, w), FadingChannel::beam_wander(geom.sigma_sa(), beta, w),
            FadingChannel::beam_wander(geom.sigma_bs(), beta, w), FadingChannel::beam_wander(geom.sigma_sb(), beta, w)};
}

}  // namespace cvsat

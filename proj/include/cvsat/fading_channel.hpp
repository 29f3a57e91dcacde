#pragma once

#include <vector>

#include "cvsat/numerics.hpp"

namespace cvsat {

/// Beam-wander fading channel with the beam centred on the aperture.
///
/// The deflection distance d is Rayleigh(sigma_b) and the transmittance of a
/// realization is eta(d) = eta0 * exp(-(d / L)^lambda / 2), which makes eta
/// log-negative Weibull distributed on [0, eta0]. Lengths are in the same
/// unit as the aperture radius beta.
///
/// sigma_b = 0 is a point mass at eta0.
class FadingChannel {
public:
    /// Derives lambda, L and eta0 from the geometry. Throws DomainError on
    /// sigma_b < 0, beta <= 0 or w <= 0, NumericalError on degenerate geometry.
    static FadingChannel beam_wander(double sigma_b, double beta, double w);

    double sigma_b() const { return sigma_b_; }
    double beta() const { return beta_; }
    double w() const { return w_; }
    double h() const { return h_; }
    double lambda_shape() const { return lambda_; }
    double l_scale() const { return l_scale_; }
    double eta0() const { return eta0_; }
    bool is_point_mass() const { return sigma_b_ == 0.0; }

    /// Density of eta; 0 outside (0, eta0). Returns 0 everywhere for a point mass.
    double pdf(double eta) const;
    /// P(eta' <= eta), closed form through the Rayleigh tail.
    double cdf(double eta) const;

    double transmittance_at(double deflection) const;
    /// Inverse of transmittance_at on (0, eta0]; +inf for eta <= 0.
    double deflection_for(double eta) const;

    /// One transmittance draw. Throws DomainError for a point-mass channel.
    double sample(Rng& rng) const;

    /// Quadrature nodes (eta_i, w_i) with sum_i w_i g(eta_i) ~ E[g(eta)], built in the
    /// deflection domain. A point mass yields the single node (eta0, 1).
    std::vector<WeightedNode> rule(const QuadratureSpec& spec) const;

    /// As rule(), restricted to realizations with eta > eta_min. Weights are
    /// unnormalized (they sum to P(eta > eta_min)).
    std::vector<WeightedNode> rule_above(double eta_min, const QuadratureSpec& spec) const;

    /// Integration cutoff in deflection distance.
    double deflection_cutoff() const { return kRayleighCutoff * sigma_b_; }
    /// Panel count used on [0, cutoff]; grows with sigma_b / L.
    int panel_count(const QuadratureSpec& spec) const;

    template <class G>
    double expectation(G&& g, const QuadratureSpec& spec) const {
        double sum = 0.0;
        for (const auto& node : rule(spec)) {
            sum += node.w * g(node.x);
        }
        return sum;
    }

    /// <eta>
    double mean_transmittance(const QuadratureSpec& spec = {}) const;
    /// Mean loss in dB of the received power fraction, -10 log10 <eta^2>.
    double loss_db(const QuadratureSpec& spec = {}) const;

    static constexpr double kRayleighCutoff = 12.0;

private:
    FadingChannel() = default;
    std::vector<WeightedNode> rule_on(double d_max, const QuadratureSpec& spec) const;

    double sigma_b_ = 0.0;
    double beta_ = 1.0;
    double w_ = 1.0;
    double h_ = 1.0;
    double lambda_ = 2.0;
    double l_scale_ = 1.0;
    double eta0_ = 1.0;
};

inline FadingChannel derive_params(double sigma_b, double beta, double w) {
    return FadingChannel::beam_wander(sigma_b, beta, w);
}

/// Beam-wander standard deviations of the four link traversals, from the
/// station-A uplink value and two ratios:
///   AS = sigma_b, SA = k1 sigma_b, BS = k2 sigma_b, SB = k1 k2 sigma_b.
struct LinkGeometry {
    double sigma_b = 0.0;
    double k1 = 1.0;
    double k2 = 1.0;

    /// Throws DomainError if sigma_b < 0, k1 outside [0, 1] or k2 < 0.
    void validate() const;

    double sigma_as() const { return sigma_b; }
    double sigma_sa() const { return k1 * sigma_b; }
    double sigma_bs() const { return k2 * sigma_b; }
    double sigma_sb() const { return k1 * k2 * sigma_b; }
};

struct LinkChannels {
    FadingChannel as;
    FadingChannel sa;
    FadingChannel bs;
    FadingChannel sb;
};

/// Same aperture and beam-spot radius on every link.
LinkChannels expand_links(const LinkGeometry& geom, double beta, double w);

}  // namespace cvsat

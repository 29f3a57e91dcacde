#include "cvsat/effective_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvsat/errors.hpp"

namespace cvsat {

EffectiveParams to_effective(const StandardFormCM& cm) {
    const double c = cm.c_plus;
    if (std::abs(cm.c_plus + cm.c_minus) > 1e-9 * std::max(1.0, std::abs(c))) {
        throw DomainError("to_effective: correlations must have the form diag(c, -c)");
    }
    const double excess = (cm.a - 1.0) * (cm.b - 1.0);
    if (!(c * c > excess)) {
        throw NotEntangledError("to_effective: c^2 <= (a - 1)(b - 1), no effective squeezing exists");
    }
    if (!(symplectic_spectrum_pt(cm).nu_minus < 1.0)) {
        throw NotEntangledError("to_effective: state is separable");
    }
    const double cosh_2r = (c * c + excess) / (c * c - excess);
    if (!(cosh_2r > 1.0)) {
        throw NotEntangledError("to_effective: effective squeezing vanishes");
    }
    return {cosh_2r, (cm.a - 1.0) / (cosh_2r - 1.0), (cm.b - 1.0) / (cosh_2r - 1.0)};
}

std::optional<EffectiveParams> try_effective(const TwoModeCM& cm) {
    try {
        return to_effective(StandardFormCM::from_cm(cm));
    } catch (const DomainError&) {
        return std::nullopt;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

EffectiveParams swap_effective_realization(const Squeezing& sq, double eta, double eta_prime) {
    if (!(eta >= 0.0 && eta <= 1.0) || !(eta_prime >= 0.0 && eta_prime <= 1.0)) {
        throw DomainError("swap_effective_realization: transmittances must lie in [0, 1]");
    }
    const double v = sq.v();
    const double sum = eta + eta_prime;
    const double gap = sum - 1.0;
    const double num = (eta * eta + eta_prime * eta_prime) * (1.0 - v) + eta * eta_prime * (v * v + 3.0) +
                       sum * (v - 3.0) + 2.0;
    const double den = gap * (sum * (v - 1.0) + 2.0);
    EffectiveParams p;
    p.cosh_2r = den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
    p.eta_a = -gap * (v - 1.0) / (eta * (1.0 - v) + 2.0 * (eta_prime - 1.0));
    p.eta_b = -gap * (v - 1.0) / (eta_prime * (1.0 - v) + 2.0 * (eta - 1.0));
    return p;
}

namespace {

EffectiveSummary swap_summary(const Squeezing& sq, const FadingChannel& first, const FadingChannel& second,
                              const QuadratureSpec& quad) {
    EffectiveSummary out;
    out.kind = SchemeKind::Swap;
    // The cosh(2r'') integrand has a simple pole on eta + eta' = 1.
    const bool pole_reachable = first.eta0() + second.eta0() >= 1.0;
    const auto rule_b = second.rule(quad);
    double cosh_sum = 0.0;
    double eta_a = 0.0;
    double eta_b = 0.0;
    double outside = 0.0;
    for (const auto& x : first.rule(quad)) {
        for (const auto& y : rule_b) {
            const double w = x.w * y.w;
            const auto p = swap_effective_realization(sq, x.x, y.x);
            eta_a += w * p.eta_a;
            eta_b += w * p.eta_b;
            if (!pole_reachable) {
                cosh_sum += w * p.cosh_2r;
            }
            const bool in_range = p.eta_a >= 0.0 && p.eta_a <= 1.0 && p.eta_b >= 0.0 && p.eta_b <= 1.0;
            if (!in_range) {
                outside += w;
            }
        }
    }
    out.eta_a = eta_a;
    out.eta_b = eta_b;
    out.out_of_range_mass = std::min(outside, 1.0);
    if (pole_reachable) {
        out.note = "cosh(2r'') average diverges: eta0_AS + eta0_BS >= 1 puts the pole eta + eta' = 1 inside the support";
    } else {
        out.cosh_2r = cosh_sum;
        out.note = "every realization has eta + eta' < 1; effective parameters lie outside the lossy-TMSV range";
    }
    return out;
}

}  // namespace

EffectiveSummary scheme_effective_summary(SchemeKind kind, const Squeezing& sq, const FadingChannel& first,
                                          const FadingChannel& second, const QuadratureSpec& quad) {
    quad.validate();
    EffectiveSummary out;
    out.kind = kind;
    switch (kind) {
        case SchemeKind::Direct: {
            const auto rule_b = second.rule(quad);
            double eta_b = 0.0;
            for (const auto& x : first.rule(quad)) {
                for (const auto& y : rule_b) {
                    eta_b += x.w * y.w * x.x * y.x;
                }
            }
            out.cosh_2r = sq.v();
            out.eta_a = 1.0;
            out.eta_b = eta_b;
            return out;
        }
        case SchemeKind::SatelliteSource:
            out.cosh_2r = sq.v();
            out.eta_a = first.mean_transmittance(quad);
            out.eta_b = second.mean_transmittance(quad);
            return out;
        case SchemeKind::Swap:
            return swap_summary(sq, first, second, quad);
    }
    throw DomainError("unknown scheme kind");
}

EffectiveSummary scheme_effective_summary(const SchemeConfig& cfg) {
    cfg.validate();
    const auto links = scheme_links(cfg.kind, expand_links(cfg.geometry, cfg.beta, cfg.w));
    return scheme_effective_summary(cfg.kind, cfg.squeezing, links[0], links[1], cfg.quad);
}

OrderingReport ordering_check(const LinkGeometry& geom, double beta, double w, const Squeezing& sq,
                              const QuadratureSpec& quad) {
    const auto links = expand_links(geom, beta, w);
    OrderingReport report;
    report.direct = scheme_effective_summary(SchemeKind::Direct, sq, links.as, links.sb, quad);
    report.satellite = scheme_effective_summary(SchemeKind::SatelliteSource, sq, links.sa, links.sb, quad);
    report.swap = scheme_effective_summary(SchemeKind::Swap, sq, links.as, links.bs, quad);
    constexpr double slack = 1e-12;
    report.swap_le_direct = report.swap.eta_product() <= report.direct.eta_product() + slack;
    report.satellite_ge_direct = report.satellite.eta_product() + slack >= report.direct.eta_product();
    return report;
}

}  // namespace cvsat

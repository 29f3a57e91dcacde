#include "cvsat/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvsat/errors.hpp"

namespace cvsat {

namespace {

void require_transmittance(double eta, const char* name) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(eta));
    }
}

void require_noise(double chi) {
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
        throw DomainError("excess noise chi must be finite and >= 0");
    }
}

double draw_transmittance(const FadingChannel& ch, Rng& rng) {
    return ch.is_point_mass() ? ch.eta0() : ch.sample(rng);
}

TwoModeCM symmetric_standard_form(double a, double b, double c, const char* context) {
    TwoModeCM cm = StandardFormCM{a, b, c, -c}.to_cm();
    cm.require_physical(context);
    return cm;
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Direct:
            return "direct";
        case SchemeKind::SatelliteSource:
            return "satellite";
        case SchemeKind::Swap:
            return "swap";
    }
    return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
    if (name == "direct") return SchemeKind::Direct;
    if (name == "satellite") return SchemeKind::SatelliteSource;
    if (name == "swap") return SchemeKind::Swap;
    throw DomainError("unknown scheme '" + std::string(name) + "' (expected direct, satellite or swap)");
}

void SchemeConfig::validate() const {
    geometry.validate();
    if (!(beta > 0.0) || !(w > 0.0)) {
        throw DomainError("beta and w must be > 0");
    }
    require_noise(chi);
    quad.validate();
}

std::array<FadingChannel, 2> scheme_links(SchemeKind kind, const LinkChannels& links) {
    switch (kind) {
        case SchemeKind::Direct:
            return {links.as, links.sb};
        case SchemeKind::SatelliteSource:
            return {links.sa, links.sb};
        case SchemeKind::Swap:
            return {links.as, links.bs};
    }
    throw DomainError("unknown scheme kind");
}

// --- direct -----------------------------------------------------------------

TwoModeCM direct_realization(const Squeezing& sq, double eta, double eta_prime, double chi) {
    require_transmittance(eta, "eta");
    require_transmittance(eta_prime, "eta_prime");
    require_noise(chi);
    return add_excess_noise(apply_loss(tmsv_cm(sq), 1.0, eta * eta_prime), 0.0, chi);
}

TwoModeCM direct_ensemble(const Squeezing& sq, const FadingChannel& uplink, const FadingChannel& downlink,
                          double chi, const QuadratureSpec& quad) {
    require_noise(chi);
    const double v = sq.v();
    const double s = sq.correlation();
    const auto up = uplink.rule(quad);
    const auto down = downlink.rule(quad);
    double b = 0.0;
    double c = 0.0;
    for (const auto& x : up) {
        double b_row = 0.0;
        double c_row = 0.0;
        for (const auto& y : down) {
            const double zeta = x.x * y.x;
            b_row += y.w * (1.0 + zeta * (v - 1.0));
            c_row += y.w * std::sqrt(zeta) * s;
        }
        b += x.w * b_row;
        c += x.w * c_row;
    }
    return symmetric_standard_form(v, b + chi, c, "direct ensemble CM");
}

TwoModeCM direct_ensemble(const SchemeConfig& cfg) {
    cfg.validate();
    const auto links = expand_links(cfg.geometry, cfg.beta, cfg.w);
    return direct_ensemble(cfg.squeezing, links.as, links.sb, cfg.chi, cfg.quad);
}

// --- satellite source ---------------------------------------------------------

TwoModeCM satellite_realization(const Squeezing& sq, double eta, double eta_prime, double chi) {
    require_transmittance(eta, "eta");
    require_transmittance(eta_prime, "eta_prime");
    require_noise(chi);
    return add_excess_noise(apply_loss(tmsv_cm(sq), eta, eta_prime), chi, chi);
}

TwoModeCM satellite_ensemble(const Squeezing& sq, const FadingChannel& down_a, const FadingChannel& down_b,
                             double chi, const QuadratureSpec& quad) {
    require_noise(chi);
    const double v = sq.v();
    const double a = down_a.expectation([v](double eta) { return 1.0 + eta * (v - 1.0); }, quad);
    const double b = down_b.expectation([v](double eta) { return 1.0 + eta * (v - 1.0); }, quad);
    const auto amplitude = [](double eta) { return std::sqrt(eta); };
    const double c = down_a.expectation(amplitude, quad) * down_b.expectation(amplitude, quad) * sq.correlation();
    return symmetric_standard_form(a + chi, b + chi, c, "satellite ensemble CM");
}

TwoModeCM satellite_ensemble(const SchemeConfig& cfg) {
    cfg.validate();
    const auto links = expand_links(cfg.geometry, cfg.beta, cfg.w);
    return satellite_ensemble(cfg.squeezing, links.sa, links.sb, cfg.chi, cfg.quad);
}

// --- swap ---------------------------------------------------------------------

TwoModeCM GeneralBipartiteInput::pair_12() const { return StandardFormCM{a, b, c_plus, c_minus}.to_cm(); }

TwoModeCM GeneralBipartiteInput::pair_34() const { return StandardFormCM{d, e, f_plus, f_minus}.to_cm(); }

void GeneralBipartiteInput::validate() const {
    if (!pair_12().is_physical() || !pair_34().is_physical()) {
        throw DomainError("swap input: both pairs must be physical covariance matrices");
    }
}

TwoModeCM swap_conditional(const GeneralBipartiteInput& inp) {
    const double bd = inp.b + inp.d;
    if (!(bd > kNumTol)) {
        throw NumericalError("swap_conditional: b + d vanishes");
    }
    Mat4 m = Mat4::Zero();
    m(0, 0) = inp.a - inp.c_plus * inp.c_plus / bd;
    m(1, 1) = inp.a - inp.c_minus * inp.c_minus / bd;
    m(2, 2) = inp.e - inp.f_plus * inp.f_plus / bd;
    m(3, 3) = inp.e - inp.f_minus * inp.f_minus / bd;
    m(0, 2) = m(2, 0) = inp.c_plus * inp.f_plus / bd;
    m(1, 3) = m(3, 1) = -inp.c_minus * inp.f_minus / bd;
    return TwoModeCM(m);
}

TwoModeCM swap_ensemble_cm(const GeneralBipartiteInput& inp, const SwapGains& gains) {
    const double bd = inp.b + inp.d;
    const double g1 = gains.g1;
    const double g4 = gains.g4;
    Mat4 m = Mat4::Zero();
    m(0, 0) = inp.a + bd * g1 * g1 - 2.0 * inp.c_plus * g1;
    m(1, 1) = inp.a + bd * g1 * g1 + 2.0 * inp.c_minus * g1;
    m(2, 2) = inp.e + bd * g4 * g4 - 2.0 * inp.f_plus * g4;
    m(3, 3) = inp.e + bd * g4 * g4 + 2.0 * inp.f_minus * g4;
    m(0, 2) = m(2, 0) = inp.c_plus * g4 + inp.f_plus * g1 - g1 * g4 * bd;
    m(1, 3) = m(3, 1) = inp.c_minus * g4 + inp.f_minus * g1 + g1 * g4 * bd;
    return TwoModeCM(m);
}

SwapGains optimal_gains(const GeneralBipartiteInput& inp) {
    const double scale = std::max({1.0, std::abs(inp.c_plus), std::abs(inp.f_plus)});
    if (std::abs(inp.c_plus + inp.c_minus) > 1e-12 * scale || std::abs(inp.f_plus + inp.f_minus) > 1e-12 * scale) {
        throw DomainError("optimal_gains: phase-independent gains need c_minus = -c_plus and f_minus = -f_plus");
    }
    const double bd = inp.b + inp.d;
    if (!(bd > kNumTol)) {
        throw NumericalError("optimal_gains: b + d vanishes");
    }
    return {inp.c_plus / bd, inp.f_plus / bd};
}

SwapGains optimal_gains(double eta, double eta_prime, const Squeezing& sq) {
    require_transmittance(eta, "eta");
    require_transmittance(eta_prime, "eta_prime");
    const double denom = 2.0 + (eta + eta_prime) * (sq.v() - 1.0);
    return {std::sqrt(eta) * sq.correlation() / denom, std::sqrt(eta_prime) * sq.correlation() / denom};
}

std::array<double, 4> conditional_mean_residuals(const GeneralBipartiteInput& inp, const SwapGains& gains) {
    const double a = inp.a, b = inp.b, d = inp.d, e = inp.e;
    const double cp = inp.c_plus, cm = inp.c_minus, fp = inp.f_plus, fm = inp.f_minus;
    const double g1 = gains.g1, g4 = gains.g4;
    const double bd = b + d;
    const double den_plus = a * (d * e - fp * fp) + e * (a * b - cp * cp);
    const double den_minus = a * (d * e - fm * fm) + e * (a * b - cm * cm);
    return {
        (-g1 * (e * bd - fp * fp) - g4 * cp * fp + e * cp) / den_plus,
        (g1 * (e * bd - fm * fm) + g4 * cm * fm + e * cm) / den_minus,
        (g4 * (a * bd - cp * cp) + g1 * cp * fp - a * fp) / den_plus,
        (g4 * (a * bd - cm * cm) + g1 * cm * fm + a * fm) / den_minus,
    };
}

GeneralBipartiteInput swap_input(const Squeezing& sq, double eta, double eta_prime, double chi) {
    require_transmittance(eta, "eta");
    require_transmittance(eta_prime, "eta_prime");
    require_noise(chi);
    const double v = sq.v();
    const double c = std::sqrt(eta) * sq.correlation();
    const double f = std::sqrt(eta_prime) * sq.correlation();
    return {v, 1.0 + eta * (v - 1.0) + chi, c, -c, 1.0 + eta_prime * (v - 1.0) + chi, v, f, -f};
}

TwoModeCM swap_realization(const Squeezing& sq, double eta, double eta_prime, double chi) {
    const auto inp = swap_input(sq, eta, eta_prime, chi);
    return swap_ensemble_cm(inp, optimal_gains(inp));
}

TwoModeCM swap_ensemble(const Squeezing& sq, const FadingChannel& uplink_a, const FadingChannel& uplink_b,
                        double chi, const QuadratureSpec& quad) {
    require_noise(chi);
    const double v = sq.v();
    const double s2 = sq.correlation() * sq.correlation();
    const auto rule_a = uplink_a.rule(quad);
    const auto rule_b = uplink_b.rule(quad);
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    for (const auto& x : rule_a) {
        double a_row = 0.0;
        double b_row = 0.0;
        double c_row = 0.0;
        for (const auto& y : rule_b) {
            const double bd = 2.0 + (x.x + y.x) * (v - 1.0) + 2.0 * chi;
            const double m = s2 / bd;
            a_row += y.w * (v - x.x * m);
            b_row += y.w * (v - y.x * m);
            c_row += y.w * std::sqrt(x.x * y.x) * m;
        }
        a += x.w * a_row;
        b += x.w * b_row;
        c += x.w * c_row;
    }
    return symmetric_standard_form(a, b, c, "swap ensemble CM");
}

TwoModeCM swap_ensemble(const SchemeConfig& cfg) {
    cfg.validate();
    const auto links = expand_links(cfg.geometry, cfg.beta, cfg.w);
    return swap_ensemble(cfg.squeezing, links.as, links.bs, cfg.chi, cfg.quad);
}

// --- dispatch -------------------------------------------------------------------

TwoModeCM scheme_realization(SchemeKind kind, const Squeezing& sq, double eta, double eta_prime, double chi) {
    switch (kind) {
        case SchemeKind::Direct:
            return direct_realization(sq, eta, eta_prime, chi);
        case SchemeKind::SatelliteSource:
            return satellite_realization(sq, eta, eta_prime, chi);
        case SchemeKind::Swap:
            return swap_realization(sq, eta, eta_prime, chi);
    }
    throw DomainError("unknown scheme kind");
}

TwoModeCM scheme_ensemble(SchemeKind kind, const Squeezing& sq, const FadingChannel& first,
                          const FadingChannel& second, double chi, const QuadratureSpec& quad) {
    switch (kind) {
        case SchemeKind::Direct:
            return direct_ensemble(sq, first, second, chi, quad);
        case SchemeKind::SatelliteSource:
            return satellite_ensemble(sq, first, second, chi, quad);
        case SchemeKind::Swap:
            return swap_ensemble(sq, first, second, chi, quad);
    }
    throw DomainError("unknown scheme kind");
}

SchemeResult evaluate_scheme(const SchemeConfig& cfg) {
    cfg.validate();
    const auto links = scheme_links(cfg.kind, expand_links(cfg.geometry, cfg.beta, cfg.w));
    TwoModeCM cm = scheme_ensemble(cfg.kind, cfg.squeezing, links[0], links[1], cfg.chi, cfg.quad);
    const double e_ln = log_negativity(cm);
    return {cfg.kind, std::move(cm), e_ln};
}

CmEstimate scheme_ensemble_mc(SchemeKind kind, const Squeezing& sq, const FadingChannel& first,
                              const FadingChannel& second, double chi, const McSpec& mc) {
    const auto draws = mc_expectation(
        16,
        [&](Rng& rng, std::span<double> out) {
            const double eta = draw_transmittance(first, rng);
            const double eta_prime = draw_transmittance(second, rng);
            const Mat4 m = scheme_realization(kind, sq, eta, eta_prime, chi).matrix();
            for (int k = 0; k < 16; ++k) {
                out[static_cast<std::size_t>(k)] = m(k / 4, k % 4);
            }
        },
        mc);
    CmEstimate est{Mat4::Zero(), Mat4::Zero()};
    for (int k = 0; k < 16; ++k) {
        est.mean(k / 4, k % 4) = draws[static_cast<std::size_t>(k)].mean;
        est.std_err(k / 4, k % 4) = draws[static_cast<std::size_t>(k)].std_err;
    }
    return est;
}

}  // namespace cvsat

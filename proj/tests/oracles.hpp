#pragma once

// Test-only reference implementations. Each one takes a different route from
// the library code it checks (eigen-decomposition instead of invariants, power
// series instead of libstdc++ special functions, explicit linear optics instead
// of closed forms, ...). None of them is used by the library.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Mat4 = Eigen::Matrix4d;
using Mat8 = Eigen::Matrix<double, 8, 8>;

// --- quadrature (Golub-Welsch) ---------------------------------------------------

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

inline Rule golub_welsch(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    Rule r;
    for (int k = 0; k < n; ++k) {
        r.x.push_back(es.eigenvalues()(k));
        const double v0 = es.eigenvectors()(0, k);
        r.w.push_back(2.0 * v0 * v0);
    }
    return r;
}

/// Composite Gauss-Legendre integral of f over [lo, hi].
inline double integrate(const std::function<double(double)>& f, double lo, double hi, int panels = 64,
                        int n = 32) {
    static const Rule base = golub_welsch(32);
    const Rule rule = n == 32 ? base : golub_welsch(n);
    const double h = (hi - lo) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        for (std::size_t k = 0; k < rule.x.size(); ++k) {
            sum += 0.5 * h * rule.w[k] * f(a + 0.5 * h * (rule.x[k] + 1.0));
        }
    }
    return sum;
}

// --- special functions -------------------------------------------------------------

inline double bessel_i_series(int order, double x) {
    long double term = std::pow(static_cast<long double>(x) / 2, order);
    for (int k = 1; k <= order; ++k) term /= k;
    long double sum = term;
    const long double q = static_cast<long double>(x) * x / 4;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<long double>(k) * (k + order));
        sum += term;
        if (term < sum * 1e-21L) break;
    }
    return static_cast<double>(sum);
}

inline double erfc_reference(double x) {
    if (x < 0.0) return 2.0 - erfc_reference(-x);
    if (x < 2.5) {
        // Maclaurin series of erf in long double.
        long double xl = x, term = xl, sum = xl;
        for (int n = 1; n < 200; ++n) {
            term *= -xl * xl / n;
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L) break;
        }
        return static_cast<double>(1.0L - 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
    }
    // Continued fraction, evaluated from the tail.
    long double f = 0.0L;
    for (int k = 300; k >= 1; --k) f = (k / 2.0L) / (x + f);
    return static_cast<double>(std::exp(-static_cast<long double>(x) * x) /
                               std::sqrt(std::numbers::pi_v<long double>) / (x + f));
}

// --- Gaussian states ---------------------------------------------------------------

/// Symplectic eigenvalues of the partial transpose from the spectrum of i Omega M_pt.
inline std::array<double, 2> pt_symplectic_eigs(const Mat4& m) {
    Mat4 flip = Mat4::Identity();
    flip(3, 3) = -1.0;
    const Mat4 pt = flip * m * flip;
    Mat4 omega = Mat4::Zero();
    omega(0, 1) = omega(2, 3) = 1.0;
    omega(1, 0) = omega(3, 2) = -1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(std::complex<double>(0, 1) * (omega * pt).cast<std::complex<double>>());
    std::array<double, 4> mags{};
    for (int k = 0; k < 4; ++k) mags[k] = std::abs(es.eigenvalues()(k));
    std::sort(mags.begin(), mags.end());
    return {0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3])};
}

inline double log_negativity(const Mat4& m) { return std::max(0.0, -std::log2(pt_symplectic_eigs(m)[0])); }

/// Lossy TMSV built by explicit beam splitters with vacuum ancillas.
inline Mat4 lossy_tmsv(double r, double eta_a, double eta_b) {
    Mat8 in = Mat8::Identity();
    const double v = std::cosh(2 * r), s = std::sinh(2 * r);
    in(0, 0) = in(1, 1) = in(2, 2) = in(3, 3) = v;
    in(0, 2) = in(2, 0) = s;
    in(1, 3) = in(3, 1) = -s;
    // modes: A, B, vacA, vacB; beam splitter A with vacA, B with vacB
    Mat8 bs = Mat8::Identity();
    const double ta = std::sqrt(eta_a), ra = std::sqrt(1 - eta_a);
    const double tb = std::sqrt(eta_b), rb = std::sqrt(1 - eta_b);
    for (int q = 0; q < 2; ++q) {
        bs(q, q) = ta;
        bs(q, 4 + q) = ra;
        bs(4 + q, q) = -ra;
        bs(4 + q, 4 + q) = ta;
        bs(2 + q, 2 + q) = tb;
        bs(2 + q, 6 + q) = rb;
        bs(6 + q, 2 + q) = -rb;
        bs(6 + q, 6 + q) = tb;
    }
    const Mat8 out = bs * in * bs.transpose();
    return out.topLeftCorner<4, 4>();
}

// --- swap ----------------------------------------------------------------------------

struct PairInput {
    double a, b, c_plus, c_minus, d, e, f_plus, f_minus;
};

/// Eight-variable CM, order (q1, p1, q2, p2, q3, p3, q4, p4).
inline Mat8 swap_joint_cm(const PairInput& in) {
    Mat8 m = Mat8::Zero();
    m(0, 0) = m(1, 1) = in.a;
    m(2, 2) = m(3, 3) = in.b;
    m(0, 2) = m(2, 0) = in.c_plus;
    m(1, 3) = m(3, 1) = in.c_minus;
    m(4, 4) = m(5, 5) = in.d;
    m(6, 6) = m(7, 7) = in.e;
    m(4, 6) = m(6, 4) = in.f_plus;
    m(5, 7) = m(7, 5) = in.f_minus;
    return m;
}

/// Balanced beam splitter on modes 2, 3 and homodyne of q_u = (q2 - q3)/sqrt2,
/// p_v = (p2 + p3)/sqrt2; Gaussian conditioning by Schur complement.
inline Mat4 swap_conditional_schur(const PairInput& in) {
    const Mat8 m = swap_joint_cm(in);
    Eigen::Matrix<double, 6, 8> t = Eigen::Matrix<double, 6, 8>::Zero();
    // kept: q1 p1 q4 p4, measured: q_u p_v
    t(0, 0) = 1;
    t(1, 1) = 1;
    t(2, 6) = 1;
    t(3, 7) = 1;
    t(4, 2) = M_SQRT1_2;
    t(4, 4) = -M_SQRT1_2;
    t(5, 3) = M_SQRT1_2;
    t(5, 5) = M_SQRT1_2;
    const Eigen::Matrix<double, 6, 6> s = t * m * t.transpose();
    const Mat4 keep = s.topLeftCorner<4, 4>();
    const Eigen::Matrix<double, 4, 2> cross = s.topRightCorner<4, 2>();
    const Eigen::Matrix2d meas = s.bottomRightCorner<2, 2>();
    return keep - cross * meas.inverse() * cross.transpose();
}

/// Unconditional CM after displacing modes 1, 4 by gains times the outcomes,
/// written as one linear map on the eight input quadratures.
inline Mat4 swap_displaced_linear(const PairInput& in, double g1, double g4) {
    const Mat8 m = swap_joint_cm(in);
    Eigen::Matrix<double, 4, 8> t = Eigen::Matrix<double, 4, 8>::Zero();
    t(0, 0) = 1;
    t(0, 2) = -g1;
    t(0, 4) = g1;
    t(1, 1) = 1;
    t(1, 3) = g1;
    t(1, 5) = g1;
    t(2, 6) = 1;
    t(2, 2) = g4;
    t(2, 4) = -g4;
    t(3, 7) = 1;
    t(3, 3) = g4;
    t(3, 5) = g4;
    return t * m * t.transpose();
}

// --- fading channel ------------------------------------------------------------------

struct ChannelParams {
    double sigma, eta0, lambda, l_scale;
};

inline ChannelParams channel_params(double sigma, double beta, double w) {
    const double h = (beta / w) * (beta / w);
    const double i0 = std::exp(-4 * h) * bessel_i_series(0, 4 * h);
    const double i1 = std::exp(-4 * h) * bessel_i_series(1, 4 * h);
    const double eta0 = std::sqrt(1 - std::exp(-2 * h));
    const double lg = std::log(2 * eta0 * eta0 / (1 - i0));
    const double lambda = 8 * h * i1 / (1 - i0) / lg;
    return {sigma, eta0, lambda, beta * std::pow(lg, -1 / lambda)};
}

inline double eta_of_d(const ChannelParams& c, double d) {
    return c.eta0 * std::exp(-0.5 * std::pow(d / c.l_scale, c.lambda));
}

/// Inverse-CDF Rayleigh draw mapped to a transmittance; sigma = 0 gives eta0.
inline double draw_eta(const ChannelParams& c, std::mt19937_64& gen) {
    if (c.sigma == 0.0) return c.eta0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double d = c.sigma * std::sqrt(-2.0 * std::log1p(-u(gen)));
    return eta_of_d(c, d);
}

// --- quantum post-selection -------------------------------------------------------------

struct Dis4 {
    double mean_qa, mean_qb, second_qa, second_qb, cross, p_accept;
};

/// Integrates the amplitude-quadrature part of the conditional Wigner function:
/// (q_A, q_B, q_v) -> tap beam splitter -> (q_A, q_B', q_t), accept q_t > q_th.
/// Coordinates are whitened with q_t first so the acceptance region is a box.
inline Dis4 dis4_wigner(double zeta, double r, double t_tap, double q_th, int n = 96) {
    const double v = std::cosh(2 * r);
    const double bq = 1 + zeta * (v - 1);
    const double cq = std::sqrt(zeta) * std::sinh(2 * r);
    const double rr = 1 - t_tap;
    Eigen::Matrix3d in;
    in << v, cq, 0, cq, bq, 0, 0, 0, 1;  // (q_A, q_B, q_v)
    Eigen::Matrix3d bs;
    // q_B' = sqrt(T) q_B - sqrt(R) q_v, q_t = sqrt(R) q_B + sqrt(T) q_v
    bs << 1, 0, 0, 0, std::sqrt(t_tap), -std::sqrt(rr), 0, std::sqrt(rr), std::sqrt(t_tap);
    const Eigen::Matrix3d out = bs * in * bs.transpose();
    // reorder to (q_t, q_A, q_B') and factor
    Eigen::Matrix3d perm;
    perm << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    const Eigen::Matrix3d sig = perm * out * perm.transpose();
    const Eigen::Matrix3d l = sig.llt().matrixL();

    const Rule g = golub_welsch(n);
    const double z_lo = q_th / l(0, 0);
    const double span = 10.0;
    Dis4 acc{0, 0, 0, 0, 0, 0};
    if (z_lo >= span) return acc;
    const double lo1 = std::max(z_lo, -span);
    const double phi_norm = 1.0 / std::sqrt(2 * std::numbers::pi);
    for (int i = 0; i < n; ++i) {
        const double z1 = lo1 + 0.5 * (span - lo1) * (g.x[i] + 1);
        const double w1 = 0.5 * (span - lo1) * g.w[i] * phi_norm * std::exp(-0.5 * z1 * z1);
        for (int j = 0; j < n; ++j) {
            const double z2 = span * g.x[j];
            const double w2 = span * g.w[j] * phi_norm * std::exp(-0.5 * z2 * z2);
            for (int k = 0; k < n; ++k) {
                const double z3 = span * g.x[k];
                const double w = w1 * w2 * span * g.w[k] * phi_norm * std::exp(-0.5 * z3 * z3);
                const double qa = l(1, 0) * z1 + l(1, 1) * z2;
                const double qb = l(2, 0) * z1 + l(2, 1) * z2 + l(2, 2) * z3;
                acc.p_accept += w;
                acc.mean_qa += w * qa;
                acc.mean_qb += w * qb;
                acc.second_qa += w * qa * qa;
                acc.second_qb += w * qb * qb;
                acc.cross += w * qa * qb;
            }
        }
    }
    return acc;
}

// --- Monte Carlo with delta-method errors ------------------------------------------------

struct McCm {
    Mat4 mean;
    Mat4 std_err;
};

/// Draws k-vectors x_i, forms f(mean x) and propagates the sample covariance of x
/// through a numerical Jacobian of f.
inline McCm delta_method(int k, const std::function<void(std::mt19937_64&, double*)>& draw,
                         const std::function<Mat4(const std::vector<double>&)>& f, long samples,
                         std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> mean(k, 0.0), x(k);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(k, k);
    for (long n = 1; n <= samples; ++n) {
        draw(gen, x.data());
        Eigen::VectorXd delta(k);
        for (int i = 0; i < k; ++i) delta(i) = x[i] - mean[i];
        for (int i = 0; i < k; ++i) mean[i] += delta(i) / n;
        Eigen::VectorXd delta2(k);
        for (int i = 0; i < k; ++i) delta2(i) = x[i] - mean[i];
        m2 += delta * delta2.transpose();
    }
    const Eigen::MatrixXd cov = m2 / static_cast<double>(samples - 1) / static_cast<double>(samples);
    McCm out{f(mean), Mat4::Zero()};
    std::vector<Mat4> jac(k);
    for (int i = 0; i < k; ++i) {
        const double h = 1e-6 * std::max(1e-3, std::abs(mean[i]));
        auto up = mean, dn = mean;
        up[i] += h;
        dn[i] -= h;
        jac[i] = (f(up) - f(dn)) / (2 * h);
    }
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            double var = 0.0;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) var += jac[i](r, c) * cov(i, j) * jac[j](r, c);
            out.std_err(r, c) = std::sqrt(std::max(0.0, var));
        }
    }
    return out;
}

}  // namespace oracle

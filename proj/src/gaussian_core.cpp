#include "cvsat/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvsat/errors.hpp"

namespace cvsat {

namespace {

// nu_minus^2, nu_plus^2 from the invariants Delta and det M. nu_minus^2 is taken
// as det / nu_plus^2 to avoid cancellation for strongly squeezed states.
SymplecticPair spectrum_from_invariants(double delta, double det) {
    double disc = delta * delta - 4.0 * det;
    if (disc < -kNumTol * std::max(1.0, delta * delta)) {
        throw NumericalError("symplectic spectrum: negative discriminant " + std::to_string(disc) +
                             " (inconsistent covariance matrix)");
    }
    disc = std::max(disc, 0.0);
    const double plus_sq = 0.5 * (delta + std::sqrt(disc));
    if (!(plus_sq > 0.0) || !(det > 0.0)) {
        throw NumericalError("symplectic spectrum: covariance matrix is not positive definite");
    }
    return {std::sqrt(det / plus_sq), std::sqrt(plus_sq)};
}

bool is_standard_form(const Mat4& m, double tol);

// Delta (with the sign of det C flipped when `transposed`) and det M. Standard-form
// matrices use the factorized determinant (ab - c+^2)(ab - c-^2).
SymplecticPair spectrum_of(const Mat4& m, bool transposed) {
    const double sign = transposed ? -1.0 : 1.0;
    if (is_standard_form(m, 1e-12)) {
        const double a = m(0, 0), b = m(2, 2), cp = m(0, 2), cm = m(1, 3);
        const double ab = a * b;
        return spectrum_from_invariants(a * a + b * b + sign * 2.0 * cp * cm, (ab - cp * cp) * (ab - cm * cm));
    }
    const double delta = m.topLeftCorner<2, 2>().determinant() + m.bottomRightCorner<2, 2>().determinant() +
                         sign * 2.0 * m.topRightCorner<2, 2>().determinant();
    return spectrum_from_invariants(delta, m.determinant());
}

bool is_standard_form(const Mat4& m, double tol) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double t = tol * scale;
    auto zero = [&](int i, int j) { return std::abs(m(i, j)) <= t; };
    return zero(0, 1) && zero(2, 3) && zero(0, 3) && zero(1, 2) && std::abs(m(0, 0) - m(1, 1)) <= t &&
           std::abs(m(2, 2) - m(3, 3)) <= t;
}

void require_unit_interval(double eta, const char* name) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError(std::string("apply_loss: ") + name + " must lie in [0, 1], got " + std::to_string(eta));
    }
}

}  // namespace

Squeezing Squeezing::from_r(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw DomainError("squeezing parameter r must be finite and >= 0, got " + std::to_string(r));
    }
    return Squeezing(r, std::cosh(2.0 * r));
}

TwoModeCM::TwoModeCM(const Mat4& m) : m_(m) {
    if (!m.allFinite()) {
        throw DomainError("covariance matrix has non-finite entries");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kNumTol * scale) {
        throw DomainError("covariance matrix is not symmetric");
    }
    m_ = 0.5 * (m + m.transpose());
}

TwoModeCM TwoModeCM::vacuum() { return TwoModeCM(Mat4::Identity()); }

std::array<double, 2> TwoModeCM::symplectic_eigenvalues() const {
    const auto pair = spectrum_of(m_, false);
    return {pair.nu_minus, pair.nu_plus};
}

bool TwoModeCM::is_physical(double tol) const {
    Eigen::SelfAdjointEigenSolver<Mat4> solver(m_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success || !(solver.eigenvalues().minCoeff() > 0.0)) {
        return false;
    }
    try {
        return symplectic_eigenvalues()[0] >= 1.0 - tol;
    } catch (const NumericalError&) {
        return false;
    }
}

const TwoModeCM& TwoModeCM::require_physical(const char* context) const {
    if (!is_physical()) {
        throw NumericalError(std::string(context) + " violates the uncertainty principle");
    }
    return *this;
}

TwoModeCM StandardFormCM::to_cm() const {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 1) = a;
    m(2, 2) = m(3, 3) = b;
    m(0, 2) = m(2, 0) = c_plus;
    m(1, 3) = m(3, 1) = c_minus;
    return TwoModeCM(m);
}

StandardFormCM StandardFormCM::from_cm(const TwoModeCM& cm, double tol) {
    if (!is_standard_form(cm.matrix(), tol)) {
        throw DomainError("covariance matrix is not in standard form");
    }
    return {cm(0, 0), cm(2, 2), cm(0, 2), cm(1, 3)};
}

Mat4 symplectic_form() {
    Mat4 omega = Mat4::Zero();
    omega(0, 1) = omega(2, 3) = 1.0;
    omega(1, 0) = omega(3, 2) = -1.0;
    return omega;
}

TwoModeCM tmsv_cm(const Squeezing& sq) {
    return StandardFormCM{sq.v(), sq.v(), sq.correlation(), -sq.correlation()}.to_cm();
}

SymplecticPair symplectic_spectrum_pt(const StandardFormCM& cm) {
    // The partial transpose flips the sign of det C.
    const double delta = cm.a * cm.a + cm.b * cm.b - 2.0 * cm.c_plus * cm.c_minus;
    const double ab = cm.a * cm.b;
    const double det = (ab - cm.c_plus * cm.c_plus) * (ab - cm.c_minus * cm.c_minus);
    return spectrum_from_invariants(delta, det);
}

SymplecticPair symplectic_spectrum_pt(const TwoModeCM& cm) { return spectrum_of(cm.matrix(), true); }

double log_negativity(const TwoModeCM& cm) {
    cm.require_physical("log_negativity input");
    const double nu_minus = symplectic_spectrum_pt(cm).nu_minus;
    return std::max(0.0, -std::log2(nu_minus));
}

TwoModeCM apply_loss(const TwoModeCM& cm, double eta_a, double eta_b) {
    require_unit_interval(eta_a, "eta_a");
    require_unit_interval(eta_b, "eta_b");
    const Eigen::Vector4d scale(std::sqrt(eta_a), std::sqrt(eta_a), std::sqrt(eta_b), std::sqrt(eta_b));
    Mat4 out = scale.asDiagonal() * cm.matrix() * scale.asDiagonal();
    out.diagonal() += Eigen::Vector4d(1.0 - eta_a, 1.0 - eta_a, 1.0 - eta_b, 1.0 - eta_b);
    return TwoModeCM(out);
}

TwoModeCM add_excess_noise(const TwoModeCM& cm, double chi_a, double chi_b) {
    if (!(chi_a >= 0.0) || !(chi_b >= 0.0)) {
        throw DomainError("add_excess_noise: excess noise must be >= 0");
    }
    Mat4 out = cm.matrix();
    out.diagonal() += Eigen::Vector4d(chi_a, chi_a, chi_b, chi_b);
    return TwoModeCM(out);
}

}  // namespace cvsat

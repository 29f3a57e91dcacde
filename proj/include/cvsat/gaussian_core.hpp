#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace cvsat {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Physicality tolerance on symplectic eigenvalues.
inline constexpr double kPhysTol = 1e-9;
/// Tolerance for discriminants and symmetry checks.
inline constexpr double kNumTol = 1e-12;

/// Two-mode squeezing, stored as both r and v = cosh(2r).
class Squeezing {
public:
    static Squeezing from_r(double r);

    double r() const { return r_; }
    double v() const { return v_; }
    /// sqrt(v^2 - 1) = sinh(2r), computed without cancellation.
    double correlation() const { return std::sinh(2.0 * r_); }

private:
    Squeezing(double r, double v) : r_(r), v_(v) {}
    double r_;
    double v_;
};

/// Covariance matrix of a two-mode Gaussian state, quadrature order (q1, p1, q2, p2),
/// vacuum variance 1.
class TwoModeCM {
public:
    /// Throws DomainError if `m` is non-finite or not symmetric.
    explicit TwoModeCM(const Mat4& m);

    static TwoModeCM vacuum();

    const Mat4& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    Mat2 block_a() const { return m_.topLeftCorner<2, 2>(); }
    Mat2 block_b() const { return m_.bottomRightCorner<2, 2>(); }
    Mat2 block_c() const { return m_.topRightCorner<2, 2>(); }

    /// Symplectic eigenvalues (nu_minus, nu_plus) of the matrix itself.
    std::array<double, 2> symplectic_eigenvalues() const;

    /// M > 0 and every symplectic eigenvalue >= 1 - tol.
    bool is_physical(double tol = kPhysTol) const;

    /// Throws NumericalError naming `context` when the CM violates the uncertainty principle.
    const TwoModeCM& require_physical(const char* context = "covariance matrix") const;

private:
    Mat4 m_;
};

/// A = aI, B = bI, C = diag(c_plus, c_minus).
struct StandardFormCM {
    double a = 1.0;
    double b = 1.0;
    double c_plus = 0.0;
    double c_minus = 0.0;

    TwoModeCM to_cm() const;

    /// Validates that `cm` already has the standard-form pattern and extracts it.
    /// Throws DomainError otherwise (general symplectic reduction is not provided).
    static StandardFormCM from_cm(const TwoModeCM& cm, double tol = 1e-10);
};

/// Omega = omega (+) omega with omega = [[0, 1], [-1, 0]].
Mat4 symplectic_form();

struct SymplecticPair {
    double nu_minus;
    double nu_plus;
};

TwoModeCM tmsv_cm(const Squeezing& sq);

/// Symplectic spectrum of the partially transposed standard-form CM, closed form.
SymplecticPair symplectic_spectrum_pt(const StandardFormCM& cm);

/// Same quantity for an arbitrary two-mode CM, from the local invariants
/// det A + det B - 2 det C and det M.
SymplecticPair symplectic_spectrum_pt(const TwoModeCM& cm);

/// max(0, -log2 nu_minus) of the partial transpose. Requires a physical CM.
double log_negativity(const TwoModeCM& cm);

/// Independent pure-loss channels on each mode.
TwoModeCM apply_loss(const TwoModeCM& cm, double eta_a, double eta_b);

/// Adds chi_a * I to the first diagonal block and chi_b * I to the second.
TwoModeCM add_excess_noise(const TwoModeCM& cm, double chi_a, double chi_b);

}  // namespace cvsat

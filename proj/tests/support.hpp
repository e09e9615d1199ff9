#pragma once

// Frozen reference values (50-digit mpmath evaluations) and oracles that do
// not share code paths with the library formulas they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <ncbateman/hamiltonians.hpp>
#include <ncbateman/params.hpp>
#include <ncbateman/transforms.hpp>

namespace testsupport {

using ncbateman::cplx;
using ncbateman::Mat4;

// gamma = 0.4, omega = 1, epsilon = 2, eta = 3, theta = 0.05, hbar = 1
inline const ncbateman::SystemParams kP0{0.4, 1.0, 2.0, 3.0, 0.05, 1.0};

namespace p0 {
inline constexpr double mu = 2.82842712474619009760;
inline constexpr double omega1_sq = 0.755;
inline constexpr double omega2_sq = 0.505;
inline constexpr double gamma1 = 0.0700035713374682049;
inline constexpr double gamma2 = 0.0346482322781408287;
inline constexpr double mu1 = 2.84972884788412392;
inline constexpr double mu2 = 2.84614437347104737;
inline constexpr double nu1_sq = 0.75;
inline constexpr double nu2_sq = 0.5;
inline constexpr double omega_plus = 0.870138937147645264;
inline constexpr double omega_minus = 0.703763973260614019;
inline constexpr double gamma_R = 0.448;
} // namespace p0

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Roots of x^4 + b x^2 + c via the dense companion matrix of the quartic.
inline std::vector<cplx> quartic_roots(cplx b, cplx c)
{
    Eigen::Matrix4cd C = Eigen::Matrix4cd::Zero();
    C(1, 0) = C(2, 1) = C(3, 2) = 1.0;
    C(0, 3) = -c;
    C(2, 3) = -b;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(C, false);
    return {es.eigenvalues().begin(), es.eigenvalues().end()};
}

/// Off-diagonal (q1 pi2, q2 pi1) entries of Q transported through the block
/// rotation, read off the congruence product directly.
inline Eigen::Vector2d transported_cross(const ncbateman::QuadraticForm& q, double a, double u)
{
    const Mat4 t = q.transported(ncbateman::diag_transform(a, 1.0, u).matrix);
    return {t(0, 3), t(1, 2)};
}

struct NewtonSolution {
    double a = 0.0;
    double u = 0.0;
    bool converged = false;
};

/// Newton iteration on the two transported cross entries, with a
/// central-difference Jacobian.
inline NewtonSolution newton_closure(const ncbateman::QuadraticForm& q, double a0, double u0)
{
    NewtonSolution s{a0, u0, false};
    for (int it = 0; it < 60; ++it) {
        const Eigen::Vector2d f = transported_cross(q, s.a, s.u);
        if (f.cwiseAbs().maxCoeff() < 1e-15) {
            s.converged = true;
            return s;
        }
        const double ha = 1e-6 * std::max(1.0, std::abs(s.a)), hu = 1e-6;
        Eigen::Matrix2d J;
        J.col(0) = (transported_cross(q, s.a + ha, s.u) - transported_cross(q, s.a - ha, s.u)) / (2 * ha);
        J.col(1) = (transported_cross(q, s.a, s.u + hu) - transported_cross(q, s.a, s.u - hu)) / (2 * hu);
        const Eigen::Vector2d step = J.fullPivLu().solve(f);
        s.a -= step(0);
        s.u -= step(1);
    }
    s.converged = transported_cross(q, s.a, s.u).cwiseAbs().maxCoeff() < 1e-13;
    return s;
}

} // namespace testsupport

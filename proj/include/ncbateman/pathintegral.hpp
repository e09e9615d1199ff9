#pragma once

// Time-sliced momentum Gaussian of the noncommutative path integral: an
// N x N matrix with sigma on the diagonal and theta/(2 hbar^2) on the first
// cyclic superdiagonal. Only the circulant completion (with the wrap-around
// entry M[N-1][0]) has the Fourier eigenbasis used below.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "params.hpp"

namespace ncbateman {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct CirculantModel {
    std::size_t slices = 1; ///< N
    double eps_step = 0.0;  ///< time step
    cplx sigma;             ///< -(i eps / (2 mu hbar) + theta / (2 hbar^2))
    double offdiag = 0.0;   ///< theta / (2 hbar^2)

    static CirculantModel make(std::size_t n, double eps_step, double mu, double theta, double hbar)
    {
        if (n < 1) throw InvalidParameter("slice count must be >= 1");
        if (!(hbar > 0.0)) throw InvalidParameter("hbar must be > 0");
        if (!(mu != 0.0) || !std::isfinite(mu)) throw InvalidParameter("mu must be finite and non-zero");
        CirculantModel c;
        c.slices = n;
        c.eps_step = eps_step;
        c.offdiag = theta / (2.0 * hbar * hbar);
        c.sigma = -(cplx(0.0, eps_step / (2.0 * mu * hbar)) + c.offdiag);
        return c;
    }

    /// mu taken from the derived parameters; needs a real mu (positive regime).
    static CirculantModel make(std::size_t n, double eps_step, const ValidatedParams& vp, const DerivedParams& d)
    {
        if (!vp.positive_regime()) throw DomainError("circulant model needs real mu (positive regime)");
        return make(n, eps_step, d.mu.real(), vp->theta, vp->hbar);
    }
};

inline CMatrix build_matrix(const CirculantModel& c)
{
    const auto n = static_cast<Eigen::Index>(c.slices);
    CMatrix M = CMatrix::Zero(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        M(l, l) += c.sigma;
        M(l, (l + 1) % n) += c.offdiag;
    }
    return M;
}

namespace detail {

inline cplx root_of_unity(std::size_t k, std::size_t n)
{
    // Reduce first so large k*l products stay exact.
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    return std::polar(1.0, angle);
}

} // namespace detail

struct Eigenpair {
    cplx value;
    CVector vector;
};

/// lambda_k = sigma + theta/(2 hbar^2) e^{2 pi i k / N},
/// u_k = N^{-1/2} (1, e^{2 pi i k/N}, e^{4 pi i k/N}, ...).
inline std::vector<Eigenpair> closed_form_eigs(const CirculantModel& c)
{
    const std::size_t n = c.slices;
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<Eigenpair> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k].value = c.sigma + c.offdiag * detail::root_of_unity(k, n);
        out[k].vector.resize(static_cast<Eigen::Index>(n));
        for (std::size_t l = 0; l < n; ++l) out[k].vector(static_cast<Eigen::Index>(l)) = norm * detail::root_of_unity(k * l % n, n);
    }
    return out;
}

/// Eigenvalues of the dense matrix from a general complex solver.
inline std::vector<cplx> dense_eigenvalues(const CMatrix& M)
{
    Eigen::ComplexEigenSolver<CMatrix> es(M, false);
    return {es.eigenvalues().begin(), es.eigenvalues().end()};
}

/// Largest distance after matching every value in `a` to its nearest
/// unused value in `b`. Equals the optimal-matching distance whenever the
/// result is below half the minimum spacing of `b`.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b)
{
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const cplx& x : a) {
        std::size_t best = b.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double dj = std::abs(x - b[j]);
            if (dj < best_d) {
                best_d = dj;
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_d);
    }
    return worst;
}

/// max_k ||M u_k - lambda_k u_k||_2
inline double eigenpair_residual(const CirculantModel& c)
{
    const CMatrix M = build_matrix(c);
    double worst = 0.0;
    for (const auto& e : closed_form_eigs(c)) worst = std::max(worst, (M * e.vector - e.value * e.vector).norm());
    return worst;
}

/// max_{j,k} |<u_j, u_k> - delta_jk|
inline double orthonormality_defect(const CirculantModel& c)
{
    const auto eigs = closed_form_eigs(c);
    CMatrix U(static_cast<Eigen::Index>(c.slices), static_cast<Eigen::Index>(c.slices));
    for (std::size_t k = 0; k < eigs.size(); ++k) U.col(static_cast<Eigen::Index>(k)) = eigs[k].vector;
    const CMatrix G = U.adjoint() * U - CMatrix::Identity(U.cols(), U.cols());
    return G.cwiseAbs().maxCoeff();
}

/// Solve M x = rhs in the Fourier eigenbasis: x = sum_k u_k (u_k^H rhs) / lambda_k.
inline CVector inverse_action(const CirculantModel& c, const CVector& rhs)
{
    if (rhs.size() != static_cast<Eigen::Index>(c.slices)) throw InvalidParameter("rhs length must equal the slice count");
    const auto eigs = closed_form_eigs(c);
    const double floor = 1e-14 * std::abs(c.sigma);
    CVector x = CVector::Zero(rhs.size());
    for (const auto& e : eigs) {
        if (std::abs(e.value) <= floor) throw SingularityError("circulant matrix is singular: an eigenvalue vanishes");
        x += e.vector * (e.vector.dot(rhs) / e.value);
    }
    return x;
}

} // namespace ncbateman

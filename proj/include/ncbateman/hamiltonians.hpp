#pragma once

// Every Hamiltonian of the model is quadratic, so each one is held as a
// symmetric 4x4 matrix Q with H(z) = 1/2 z^T Q z.

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "linalg.hpp"
#include "params.hpp"

namespace ncbateman {

enum class HamiltonianLabel {
    bateman,   ///< indefinite Bateman Hamiltonian in (x1, x2, p1, p2)
    augmented, ///< with linear and derivative couplings; unequal masses eta +- 1
    final,     ///< equal mass mu after the T2 rescale
    commuting, ///< final form rewritten in commuting position coordinates
};

inline const char* to_string(HamiltonianLabel l)
{
    switch (l) {
    case HamiltonianLabel::bateman: return "H_bateman";
    case HamiltonianLabel::augmented: return "H_augmented";
    case HamiltonianLabel::final: return "H_final";
    case HamiltonianLabel::commuting: return "H_commuting";
    }
    return "unknown";
}

struct QuadraticForm {
    Mat4 matrix;
    HamiltonianLabel label;

    double operator()(const Vec4& z) const { return 0.5 * z.dot(matrix * z); }

    /// The same Hamiltonian expressed in coordinates w where z = M w.
    Mat4 transported(const Mat4& M) const { return M.transpose() * matrix * M; }
};

namespace detail {

inline double require_real(const cplx& z, const char* what)
{
    if (std::abs(z.imag()) > 1e-12 * (1.0 + std::abs(z.real())))
        throw DomainError(std::string(what) + " is complex outside the positive regime");
    return z.real();
}

} // namespace detail

inline QuadraticForm build_bateman(double gamma, double omega)
{
    const double w_sq = omega * omega;
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = w_sq - gamma * gamma / 4.0;
    Q(1, 1) = gamma * gamma / 4.0 - w_sq;
    Q(2, 2) = 1.0;
    Q(3, 3) = -1.0;
    Q(0, 3) = Q(3, 0) = -gamma / 2.0; // x1 p2
    Q(1, 2) = Q(2, 1) = -gamma / 2.0; // x2 p1
    return {Q, HamiltonianLabel::bateman};
}

inline QuadraticForm build_augmented(const SystemParams& p)
{
    const double ep = p.eta + 1.0;
    const double em = p.eta - 1.0;
    if (ep == 0.0 || em == 0.0) throw SingularityError("augmented Hamiltonian is singular at eta = +-1");
    const double g = p.gamma;
    const double w_sq = p.omega * p.omega;
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = g * g / (4.0 * em) + (p.epsilon + w_sq);
    Q(1, 1) = g * g / (4.0 * ep) + (p.epsilon - w_sq);
    Q(2, 2) = 1.0 / ep;
    Q(3, 3) = 1.0 / em;
    Q(0, 3) = Q(3, 0) = g / (2.0 * em);
    Q(1, 2) = Q(2, 1) = -g / (2.0 * ep);
    return {Q, HamiltonianLabel::augmented};
}

inline QuadraticForm build_final(const SystemParams& p, const DerivedParams& d)
{
    const double mu = detail::require_real(d.mu, "mu");
    const double w1 = detail::require_real(d.omega1_sq, "omega1^2");
    const double w2 = detail::require_real(d.omega2_sq, "omega2^2");
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = mu * w1;
    Q(1, 1) = mu * w2;
    Q(2, 2) = 1.0 / mu;
    Q(3, 3) = 1.0 / mu;
    Q(0, 3) = Q(3, 0) = p.gamma / (2.0 * mu);
    Q(1, 2) = Q(2, 1) = -p.gamma / (2.0 * mu);
    return {Q, HamiltonianLabel::final};
}

inline QuadraticForm build_commuting(const DerivedParams& d)
{
    const double mu = detail::require_real(d.mu, "mu");
    const double w1 = detail::require_real(d.omega1_sq, "omega1^2");
    const double w2 = detail::require_real(d.omega2_sq, "omega2^2");
    const double mu1 = detail::require_real(d.mu1, "mu1");
    const double mu2 = detail::require_real(d.mu2, "mu2");
    const double g1 = detail::require_real(d.gamma1, "gamma1");
    const double g2 = detail::require_real(d.gamma2, "gamma2");
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = mu * w1;
    Q(1, 1) = mu * w2;
    Q(2, 2) = 1.0 / mu1;
    Q(3, 3) = 1.0 / mu2;
    Q(0, 3) = Q(3, 0) = g2 / 2.0;  // + gamma2/2 X1c P2
    Q(1, 2) = Q(2, 1) = -g1 / 2.0; // - gamma1/2 X2c P1
    return {Q, HamiltonianLabel::commuting};
}

inline QuadraticForm build(HamiltonianLabel label, const ValidatedParams& vp, const DerivedParams& d)
{
    switch (label) {
    case HamiltonianLabel::bateman: return build_bateman(vp->gamma, vp->omega);
    case HamiltonianLabel::augmented: return build_augmented(vp.values());
    case HamiltonianLabel::final:
        if (!vp.positive_regime()) throw DomainError("H_final requires the positive regime");
        return build_final(vp.values(), d);
    case HamiltonianLabel::commuting:
        if (!vp.positive_regime()) throw DomainError("H_commuting requires the positive regime");
        return build_commuting(d);
    }
    throw InvalidParameter("unknown Hamiltonian label");
}

struct SplitEnergies {
    double h1 = 0.0;
    double h2 = 0.0;
};

/// H1 = 1/2 (p1 - gamma x2/2)^2 + 1/2 omega^2 x1^2, H2 = 1/2 (p2 + gamma x1/2)^2 + 1/2 omega^2 x2^2.
inline SplitEnergies split_h1_h2(const SystemParams& p, const PhasePoint& z)
{
    const double w_sq = p.omega * p.omega;
    const double a = z[2] - p.gamma * z[1] / 2.0;
    const double b = z[3] + p.gamma * z[0] / 2.0;
    return {0.5 * a * a + 0.5 * w_sq * z[0] * z[0], 0.5 * b * b + 0.5 * w_sq * z[1] * z[1]};
}

struct Definiteness {
    bool positive = false;
    double min_eigenvalue = 0.0;
    double norm = 0.0;     ///< largest |eigenvalue|
    Vec4 witness;          ///< unit eigenvector of the smallest eigenvalue
    double witness_value;  ///< witness^T Q witness
};

/// Positive iff every eigenvalue of Q exceeds 1e-12 ||Q||.
inline Definiteness is_positive_definite(const QuadraticForm& q)
{
    Eigen::SelfAdjointEigenSolver<Mat4> es(q.matrix);
    const auto& ev = es.eigenvalues();
    Definiteness r;
    r.norm = ev.cwiseAbs().maxCoeff();
    r.min_eigenvalue = ev[0];
    r.positive = r.norm > 0.0 && ev[0] > 1e-12 * r.norm;
    r.witness = es.eigenvectors().col(0);
    r.witness_value = r.witness.dot(q.matrix * r.witness);
    return r;
}

} // namespace ncbateman

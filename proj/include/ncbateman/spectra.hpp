#pragma once

// Characteristic frequencies by two independent routes:
//  * closed form from the quartic of the effective equations of motion,
//  * explicit canonical diagonalization of the commuting-coordinate
//    Hamiltonian by the block rotation diag_transform(a, b, u),
// plus the eps, eta -> 0 limit that recovers a Bateman pair with
// renormalized damping.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "hamiltonians.hpp"
#include "params.hpp"
#include "transforms.hpp"

namespace ncbateman {

struct PathIntegralSpectrum {
    cplx omega_plus;
    cplx omega_minus;
    cplx omega_plus_sq;
    cplx omega_minus_sq;
    /// Some Omega^2 is not a positive real: complex (growing/decaying) modes.
    bool unstable = false;
};

namespace detail {

/// Omega_+ is the branch with larger Re Omega^2; ties go to larger Im.
inline bool ranks_above(const cplx& a, const cplx& b)
{
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

} // namespace detail

inline PathIntegralSpectrum pathintegral_spectrum(const DerivedParams& d)
{
    const cplx g12 = d.gamma1 * d.gamma2;
    const cplx sum = d.nu1_sq + d.nu2_sq;
    const cplx diff = d.nu1_sq - d.nu2_sq;
    const cplx inner = std::sqrt(g12 * (2.0 * sum + g12) + diff * diff);
    cplx hi = 0.5 * (sum + g12) + 0.5 * inner;
    cplx lo = 0.5 * (sum + g12) - 0.5 * inner;
    if (detail::ranks_above(lo, hi)) std::swap(hi, lo);

    PathIntegralSpectrum s;
    s.omega_plus_sq = hi;
    s.omega_minus_sq = lo;
    s.omega_plus = std::sqrt(hi);
    s.omega_minus = std::sqrt(lo);
    auto non_positive_real = [](const cplx& z) {
        return z.real() <= 0.0 || std::abs(z.imag()) > 1e-12 * std::abs(z.real());
    };
    s.unstable = non_positive_real(hi) || non_positive_real(lo);
    return s;
}

/// Real coefficients of the commuting-coordinate Hamiltonian
/// P1^2/2mu1 + P2^2/2mu2 + mu(w1^2 X1^2 + w2^2 X2^2)/2 + g2/2 X1 P2 - g1/2 X2 P1.
struct CommutingCoefficients {
    double mu, mu1, mu2, w1_sq, w2_sq, g1, g2;

    static CommutingCoefficients from(const DerivedParams& d)
    {
        return {detail::require_real(d.mu, "mu"),       detail::require_real(d.mu1, "mu1"),
                detail::require_real(d.mu2, "mu2"),     detail::require_real(d.omega1_sq, "omega1^2"),
                detail::require_real(d.omega2_sq, "omega2^2"), detail::require_real(d.gamma1, "gamma1"),
                detail::require_real(d.gamma2, "gamma2")};
    }
};

/// H = sigma1^2 pi1^2 + sigma2^2 pi2^2 + k1^2 q1^2 + k2^2 q2^2 + lambda1 q1 pi2 + lambda2 q2 pi1
/// after substituting diag_transform(a, b, u).
struct DiagonalCoefficients {
    double k1_sq, k2_sq, sigma1_sq, sigma2_sq, lambda1, lambda2;

    double scale() const
    {
        return std::max({std::abs(k1_sq), std::abs(k2_sq), std::abs(sigma1_sq), std::abs(sigma2_sq)});
    }
};

inline DiagonalCoefficients diagonal_coefficients(const CommutingCoefficients& h, double a, double b, double u)
{
    const double s = std::sin(u), c = std::cos(u);
    const double s2 = std::sin(2.0 * u), c2 = std::cos(2.0 * u);
    DiagonalCoefficients r;
    // (q1, pi2) pair comes from X1c and P2; (q2, pi1) from X2c and P1.
    r.k1_sq = h.mu * h.w1_sq * a * a * c * c / 2.0 + b * b * s * s / (2.0 * h.mu2) - h.g2 * a * b * s2 / 4.0;
    r.sigma2_sq = h.mu * h.w1_sq * s * s / (2.0 * b * b) + c * c / (2.0 * h.mu2 * a * a) + h.g2 * s2 / (4.0 * a * b);
    r.lambda1 = h.mu * h.w1_sq * a * s2 / (2.0 * b) - b * s2 / (2.0 * h.mu2 * a) + h.g2 * c2 / 2.0;

    r.k2_sq = h.mu * h.w2_sq * a * a * c * c / 2.0 + b * b * s * s / (2.0 * h.mu1) + h.g1 * a * b * s2 / 4.0;
    r.sigma1_sq = h.mu * h.w2_sq * s * s / (2.0 * b * b) + c * c / (2.0 * h.mu1 * a * a) - h.g1 * s2 / (4.0 * a * b);
    r.lambda2 = h.mu * h.w2_sq * a * s2 / (2.0 * b) - b * s2 / (2.0 * h.mu1 * a) - h.g1 * c2 / 2.0;
    return r;
}

struct CanonicalRoute {
    double ratio_ab = 1.0; ///< a/b; b is fixed to 1, frequencies depend on the ratio only
    double u = 0.0;
    DiagonalCoefficients coeffs{};
    double lambda_residual = 0.0; ///< max |lambda_i| / largest diagonal coefficient
    double omega_tilde1 = 0.0;    ///< 2 k1 sigma1
    double omega_tilde2 = 0.0;    ///< 2 k2 sigma2
    bool already_diagonal = false; ///< gamma1 = gamma2 = 0, u = 0 without solving
    bool quarter_turn = false;     ///< mu2 w1^2 = mu1 w2^2, tan 2u infinite, u = pi/4 family
};

namespace detail {

inline std::pair<double, double> frequencies_of(const DiagonalCoefficients& c)
{
    const double p1 = c.k1_sq * c.sigma1_sq;
    const double p2 = c.k2_sq * c.sigma2_sq;
    if (!(p1 > 0.0) || !(p2 > 0.0)) throw DomainError("diagonal form is not positive; no oscillator frequencies");
    return {2.0 * std::sqrt(p1), 2.0 * std::sqrt(p2)};
}

inline CanonicalRoute finish_route(const CommutingCoefficients& h, double ratio, double u)
{
    CanonicalRoute r;
    r.ratio_ab = ratio;
    r.u = u;
    r.coeffs = diagonal_coefficients(h, ratio, 1.0, u);
    r.lambda_residual = std::max(std::abs(r.coeffs.lambda1), std::abs(r.coeffs.lambda2)) / r.coeffs.scale();
    std::tie(r.omega_tilde1, r.omega_tilde2) = frequencies_of(r.coeffs);
    return r;
}

} // namespace detail

/// Closed-form solution of lambda1 = lambda2 = 0:
///   (a/b)^2 = (mu1 g1 + mu2 g2) / (mu mu1 mu2 (g1 w1^2 + g2 w2^2))
///   tan 2u  = -(a/b) mu1 mu2 (g1 w1^2 + g2 w2^2) / (mu2 w1^2 - mu1 w2^2)
/// Of the two rotations solving tan 2u (u and u - pi/2) the one with
/// 2 k1 sigma1 >= 2 k2 sigma2 is kept, so mode 1 is the faster mode.
inline CanonicalRoute canonical_spectrum(const ValidatedParams& vp, const DerivedParams& d)
{
    if (!vp.positive_regime()) throw DomainError("canonical route requires the positive regime (eta > 1, epsilon > omega^2)");
    const auto h = CommutingCoefficients::from(d);

    const double gscale = 1e-14 * (std::abs(h.g1) + std::abs(h.g2) + std::abs(vp->gamma) / std::abs(h.mu) +
                                   std::abs(h.mu) * vp->theta * (std::abs(h.w1_sq) + std::abs(h.w2_sq)) / vp->hbar);
    if (std::abs(h.g1) <= gscale && std::abs(h.g2) <= gscale) {
        CanonicalRoute r = detail::finish_route(h, 1.0, 0.0);
        r.already_diagonal = true;
        if (r.omega_tilde1 < r.omega_tilde2) {
            r = detail::finish_route(h, 1.0, -std::numbers::pi / 2.0);
            r.already_diagonal = true;
        }
        return r;
    }

    const double weight = h.g1 * h.w1_sq + h.g2 * h.w2_sq;
    const double ratio_sq = (h.mu1 * h.g1 + h.mu2 * h.g2) / (h.mu * h.mu1 * h.mu2 * weight);
    if (!(ratio_sq > 0.0) || !std::isfinite(ratio_sq))
        throw DomainError("(a/b)^2 is not positive: no real block rotation diagonalizes this Hamiltonian");
    const double ratio = std::sqrt(ratio_sq);

    const double num = -ratio * h.mu1 * h.mu2 * weight;
    const double den = h.mu2 * h.w1_sq - h.mu1 * h.w2_sq;
    double two_u = std::atan2(num, den);
    if (two_u <= 0.0) two_u += std::numbers::pi; // 2u in (0, pi]
    const double u0 = two_u / 2.0;

    CanonicalRoute r = detail::finish_route(h, ratio, u0);
    if (r.omega_tilde1 < r.omega_tilde2) r = detail::finish_route(h, ratio, u0 - std::numbers::pi / 2.0);
    r.quarter_turn = std::abs(den) <= 1e-14 * (std::abs(h.mu2 * h.w1_sq) + std::abs(h.mu1 * h.w2_sq));
    return r;
}

struct SpectrumReport {
    PathIntegralSpectrum pathintegral;
    std::optional<CanonicalRoute> canonical;
    std::string canonical_unavailable; ///< reason, when canonical is empty
    /// max relative |Omega~1 - Omega+|, |Omega~2 - Omega-|; empty without a canonical route
    std::optional<double> agreement_error;
};

inline double relative_gap(const cplx& a, const cplx& b)
{
    const double den = std::max(std::abs(b), std::numeric_limits<double>::min());
    return std::abs(a - b) / den;
}

inline SpectrumReport spectrum_report(const ValidatedParams& vp, const DerivedParams& d)
{
    SpectrumReport rep;
    rep.pathintegral = pathintegral_spectrum(d);
    try {
        rep.canonical = canonical_spectrum(vp, d);
        rep.agreement_error = std::max(relative_gap(rep.canonical->omega_tilde1, rep.pathintegral.omega_plus),
                                       relative_gap(rep.canonical->omega_tilde2, rep.pathintegral.omega_minus));
    } catch (const DomainError& e) {
        rep.canonical_unavailable = e.what();
    }
    return rep;
}

struct DiagonalizationResidual {
    double max_offdiag = 0.0; ///< largest off-diagonal entry of S^T Q S (q1 pi2 and q2 pi1 included)
    double norm = 0.0;        ///< ||Q||_2
    double relative() const { return norm > 0.0 ? max_offdiag / norm : max_offdiag; }
};

/// Transport q through diag_transform(a, b, u) by congruence and measure
/// what is left off the diagonal.
inline DiagonalizationResidual transported_residual(const QuadraticForm& q, double a, double b, double u)
{
    Mat4 t = q.transported(diag_transform(a, b, u).matrix);
    DiagonalizationResidual r;
    r.norm = q.matrix.jacobiSvd().singularValues()(0);
    t.diagonal().setZero();
    r.max_offdiag = t.cwiseAbs().maxCoeff();
    return r;
}

inline DiagonalizationResidual quadform_diag_check(const ValidatedParams& vp, const DerivedParams& d)
{
    const CanonicalRoute route = canonical_spectrum(vp, d);
    return transported_residual(build_commuting(d), route.ratio_ab, 1.0, route.u);
}

// ---------------------------------------------------------------------------
// eps = eta = delta -> 0 limit

struct LimitRow {
    double delta = 0.0;
    PathIntegralSpectrum spectrum;
    double error = 0.0; ///< max |Omega^2 - (lambda^R)^2| under the better pairing
};

struct LimitTable {
    cplx lambda_plus;  ///< i gamma_R/2 + sqrt(omega^2 - gamma_R^2/4)
    cplx lambda_minus;
    double gamma_R = 0.0;
    std::vector<LimitRow> rows;
    bool monotone_decreasing = true; ///< strictly, except for rows already at round-off
};

namespace detail {

inline double paired_error(const PathIntegralSpectrum& s, const cplx& lp, const cplx& lm)
{
    const cplx lp2 = lp * lp, lm2 = lm * lm;
    const double straight = std::max(std::abs(s.omega_plus_sq - lp2), std::abs(s.omega_minus_sq - lm2));
    const double crossed = std::max(std::abs(s.omega_plus_sq - lm2), std::abs(s.omega_minus_sq - lp2));
    return std::min(straight, crossed);
}

inline SystemParams with_couplings(SystemParams p, double delta)
{
    p.epsilon = delta;
    p.eta = delta;
    return p;
}

} // namespace detail

/// Closed-form spectrum at eps = eta = delta (mu = i sqrt(1 - delta^2) on the
/// principal branch) compared with the renormalized Bateman roots.
inline LimitRow bateman_limit_row(const SystemParams& p, double delta)
{
    if (!(delta >= 0.0 && delta < 1.0))
        throw InvalidParameter("limit parameter delta must lie in [0, 1); delta = 1 is the eta singularity");
    const auto vp = validate(detail::with_couplings(p, delta));
    const auto [lp, lm] = bateman_roots(gamma_renormalized(p), p.omega);
    LimitRow row;
    row.delta = delta;
    row.spectrum = pathintegral_spectrum(derive(vp));
    row.error = detail::paired_error(row.spectrum, lp, lm);
    return row;
}

inline LimitTable bateman_limit_spectrum(const SystemParams& p, std::span<const double> deltas)
{
    LimitTable t;
    t.gamma_R = gamma_renormalized(p);
    std::tie(t.lambda_plus, t.lambda_minus) = bateman_roots(t.gamma_R, p.omega);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw InvalidParameter("delta sequence must be strictly decreasing");
        if (!(deltas[i] > 0.0)) throw InvalidParameter("delta values must be > 0; use bateman_limit_row(p, 0) for the endpoint");
        t.rows.push_back(bateman_limit_row(p, deltas[i]));
        // Rows already at round-off (e.g. gamma_R = 0 with omega = 1) count as converged.
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::norm(t.lambda_plus));
        if (i > 0 && !(t.rows[i].error < t.rows[i - 1].error) && t.rows[i].error > floor) t.monotone_decreasing = false;
    }
    return t;
}

} // namespace ncbateman

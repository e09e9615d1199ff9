#pragma once

// Physical parameters of the noncommutative Bateman system, every derived
// scalar, and the damping <-> noncommutativity duality formulas.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"

namespace ncbateman {

using cplx = std::complex<double>;

/// The six physical inputs. Natural units, unit oscillator mass.
struct SystemParams {
    double gamma = 0.0;   ///< damping rate
    double omega = 0.0;   ///< bare angular frequency
    double epsilon = 0.0; ///< linear x-y coupling strength
    double eta = 0.0;     ///< second-derivative x-y coupling (mass)
    double theta = 0.0;   ///< noncommutativity parameter [x1, x2] = i theta
    double hbar = 1.0;
};

/// SystemParams that passed validate(). Values are never altered; only the
/// regime flag is attached.
class ValidatedParams {
public:
    const SystemParams& values() const noexcept { return p_; }
    const SystemParams* operator->() const noexcept { return &p_; }

    /// eta > 1 and epsilon > omega^2: the augmented Hamiltonian is bounded below.
    bool positive_regime() const noexcept { return positive_regime_; }

private:
    friend ValidatedParams validate(const SystemParams& p);
    ValidatedParams(const SystemParams& p, bool positive) : p_(p), positive_regime_(positive) {}

    SystemParams p_;
    bool positive_regime_ = false;
};

inline ValidatedParams validate(const SystemParams& p)
{
    const std::pair<const char*, double> fields[] = {
        {"gamma", p.gamma}, {"omega", p.omega}, {"epsilon", p.epsilon},
        {"eta", p.eta},     {"theta", p.theta}, {"hbar", p.hbar}};
    for (const auto& [name, value] : fields) {
        if (!std::isfinite(value))
            throw InvalidParameter(std::string(name) + " must be finite");
    }
    if (p.theta < 0.0) throw InvalidParameter("theta must be >= 0");
    if (p.hbar <= 0.0) throw InvalidParameter("hbar must be > 0");
    if (p.gamma < 0.0) throw InvalidParameter("gamma must be >= 0");
    if (p.omega < 0.0) throw InvalidParameter("omega must be >= 0");
    if (p.epsilon < 0.0) throw InvalidParameter("epsilon must be >= 0");

    const bool positive = p.eta > 1.0 && p.epsilon > p.omega * p.omega;
    return ValidatedParams(p, positive);
}

/// Derived scalars. Stored complex so that eta < 1 (imaginary mu) runs
/// through the same formulas as the positive regime.
struct DerivedParams {
    cplx mu;        ///< sqrt((eta+1)(eta-1)), principal branch
    cplx omega1_sq; ///< squared frequencies of the equal-mass Hamiltonian
    cplx omega2_sq;
    cplx gamma1;    ///< effective couplings of the noncommutative equations of motion
    cplx gamma2;
    cplx mu1;       ///< effective masses in commuting coordinates
    cplx mu2;
    cplx nu1_sq;    ///< omega_i^2 - gamma^2 / (4 mu^2)
    cplx nu2_sq;

    /// Largest |Im| over all fields, each scaled by (1 + |Re|).
    double max_relative_imag() const noexcept
    {
        double worst = 0.0;
        for (const cplx& z : {mu, omega1_sq, omega2_sq, gamma1, gamma2, mu1, mu2, nu1_sq, nu2_sq})
            worst = std::max(worst, std::abs(z.imag()) / (1.0 + std::abs(z.real())));
        return worst;
    }
};

inline DerivedParams derive(const ValidatedParams& vp)
{
    const SystemParams& p = vp.values();
    const double eta_sq_minus_one = (p.eta + 1.0) * (p.eta - 1.0);
    if (eta_sq_minus_one == 0.0)
        throw SingularityError("eta = +-1 is singular (constrained system); derived parameters undefined");

    const double g = p.gamma;
    const double w_sq = p.omega * p.omega;
    const double hbar = p.hbar;
    const double th = p.theta;

    DerivedParams d;
    d.mu = std::sqrt(cplx(eta_sq_minus_one, 0.0));
    const double base = g * g / (4.0 * eta_sq_minus_one);
    d.omega1_sq = base + (p.epsilon + w_sq) / (p.eta + 1.0);
    d.omega2_sq = base + (p.epsilon - w_sq) / (p.eta - 1.0);

    d.gamma1 = g / d.mu - d.mu * th * d.omega2_sq / hbar;
    d.gamma2 = g / d.mu - d.mu * th * d.omega1_sq / hbar;

    const cplx mu_sq = d.mu * d.mu;
    const cplx den1 = 1.0 - g * th / (2.0 * hbar) + mu_sq * th * th * d.omega2_sq / (4.0 * hbar * hbar);
    const cplx den2 = 1.0 - g * th / (2.0 * hbar) + mu_sq * th * th * d.omega1_sq / (4.0 * hbar * hbar);
    if (den1 == 0.0 || den2 == 0.0)
        throw SingularityError("effective mass denominator vanishes");
    d.mu1 = d.mu / den1;
    d.mu2 = d.mu / den2;

    const cplx shift = g * g / (4.0 * mu_sq);
    d.nu1_sq = d.omega1_sq - shift;
    d.nu2_sq = d.omega2_sq - shift;
    return d;
}

/// gamma_R = gamma + theta omega^2 / hbar - theta gamma^2 / (4 hbar).
/// Affine in theta; epsilon and eta play no role.
inline double gamma_renormalized(const SystemParams& p)
{
    return p.gamma + p.theta * p.omega * p.omega / p.hbar - p.theta * p.gamma * p.gamma / (4.0 * p.hbar);
}

struct ThetaStar {
    std::optional<double> value;
    std::string reason; ///< why it is absent; empty when present
};

/// The theta that cancels gamma_R; exists only when gamma^2/4 > omega^2.
inline ThetaStar theta_star(const SystemParams& p)
{
    const double excess = p.gamma * p.gamma / 4.0 - p.omega * p.omega;
    if (!(excess > 0.0))
        return {std::nullopt, "gamma^2/4 <= omega^2: no positive theta cancels the damping"};
    return {p.gamma * p.hbar / excess, {}};
}

/// [x, y] bracket of the constrained eta = 1 system.
inline double dirac_bracket(const SystemParams& p)
{
    const double den = 7.0 * p.gamma * p.gamma + 8.0 * (p.epsilon - p.omega * p.omega);
    if (den == 0.0) throw SingularityError("Dirac bracket denominator 7 gamma^2 + 8(epsilon - omega^2) vanishes");
    return 4.0 * p.gamma / den;
}

/// Roots of x = exp(i lambda t) for x'' + gamma x' + omega^2 x = 0:
/// lambda = i gamma/2 +- sqrt(omega^2 - gamma^2/4).
inline std::pair<cplx, cplx> bateman_roots(double gamma, double omega)
{
    if (gamma == 0.0) return {cplx(omega, 0.0), cplx(-omega, 0.0)};
    const cplx root = std::sqrt(cplx(omega * omega - gamma * gamma / 4.0, 0.0));
    const cplx centre(0.0, gamma / 2.0);
    return {centre + root, centre - root};
}

enum class DampingRegime { oscillatory, overdamped, critical };

inline const char* to_string(DampingRegime r)
{
    switch (r) {
    case DampingRegime::oscillatory: return "oscillatory";
    case DampingRegime::overdamped: return "overdamped";
    case DampingRegime::critical: return "critical";
    }
    return "unknown";
}

struct DualityReport {
    double gamma_R = 0.0;
    ThetaStar theta_star;
    double critical_ratio = 0.0; ///< 4 omega^2 / gamma_R^2, +inf when gamma_R = 0
    DampingRegime regime = DampingRegime::oscillatory;
};

inline DampingRegime classify_regime(double critical_ratio)
{
    if (std::abs(critical_ratio - 1.0) <= 1e-12) return DampingRegime::critical;
    return critical_ratio > 1.0 ? DampingRegime::oscillatory : DampingRegime::overdamped;
}

inline DualityReport duality(const SystemParams& p)
{
    DualityReport r;
    r.gamma_R = gamma_renormalized(p);
    r.theta_star = theta_star(p);
    const double g_sq = r.gamma_R * r.gamma_R;
    r.critical_ratio = g_sq == 0.0 ? std::numeric_limits<double>::infinity() : 4.0 * p.omega * p.omega / g_sq;
    r.regime = classify_regime(r.critical_ratio);
    return r;
}

} // namespace ncbateman

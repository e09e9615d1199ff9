#pragma once

// Seeded self-check: every module's invariants evaluated with measured
// residuals. Failures are verdicts, never exceptions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "hamiltonians.hpp"
#include "params.hpp"
#include "pathintegral.hpp"
#include "spectra.hpp"
#include "transforms.hpp"

namespace ncbateman {

/// Uniform draws from a 64-bit Mersenne twister, mapped to doubles by bit
/// manipulation so the stream is the same on every standard library.
class ParameterSampler {
public:
    explicit ParameterSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    /// eta > 1, epsilon > omega^2, and gamma1 gamma2 > 0 so that a real
    /// block rotation exists.
    SystemParams positive_regime()
    {
        for (;;) {
            SystemParams p;
            p.gamma = uniform(0.0, 2.0);
            p.omega = uniform(0.2, 2.0);
            p.eta = uniform(1.1, 5.0);
            p.epsilon = p.omega * p.omega + uniform(0.1, 4.0);
            p.theta = uniform(0.0, 0.3);
            p.hbar = uniform(0.5, 2.0);
            const auto d = derive(validate(p));
            if ((d.gamma1 * d.gamma2).real() > 1e-6) return p;
            ++rejected_;
        }
    }

    /// Outside the positive regime, away from the eta = +-1 and
    /// epsilon = omega^2 boundaries where the Hessian degenerates.
    SystemParams outside_regime()
    {
        for (;;) {
            SystemParams p;
            p.gamma = uniform(0.0, 2.0);
            p.omega = uniform(0.2, 2.0);
            p.eta = uniform(-3.0, 6.0);
            p.epsilon = uniform(0.0, 5.0);
            p.theta = uniform(0.0, 0.3);
            p.hbar = 1.0;
            const bool inside = p.eta > 1.0 && p.epsilon > p.omega * p.omega;
            const bool near_edge = std::abs(std::abs(p.eta) - 1.0) < 0.05 || std::abs(p.epsilon - p.omega * p.omega) < 0.05;
            if (!inside && !near_edge) return p;
        }
    }

    std::size_t rejected() const noexcept { return rejected_; }

private:
    std::mt19937_64 rng_;
    std::size_t rejected_ = 0;
};

struct CheckResult {
    std::string name;
    std::string module;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t rejected_samples = 0;
    bool injected_flip_gamma2 = false;
    std::vector<CheckResult> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

namespace detail {

inline CheckResult bound_check(std::string name, std::string module, double residual, double tol, std::string detail = {})
{
    const bool ok = std::isfinite(residual) && residual < tol;
    return {std::move(name), std::move(module), ok, residual, tol, std::move(detail)};
}

/// |Im| of the oracle eigenvalues against {Omega+, Omega+, Omega-, Omega-}, relative.
inline double companion_error(const LinearModel& m, const PathIntegralSpectrum& s)
{
    std::vector<double> im;
    for (const cplx& z : eigen_oracle(m)) im.push_back(std::abs(z.imag()));
    std::sort(im.begin(), im.end());
    const double lo = s.omega_minus.real(), hi = s.omega_plus.real();
    const double expect[] = {lo, lo, hi, hi};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(im[i] - expect[i]) / expect[i]);
    return worst;
}

} // namespace detail

inline VerifyReport run_verify(const RunConfig& cfg)
{
    const Tolerances& tol = cfg.tol;
    VerifyReport rep;
    rep.seed = cfg.seed;
    rep.samples = cfg.verify_samples;
    rep.injected_flip_gamma2 = cfg.inject_flip_gamma2;
    ParameterSampler sampler(cfg.seed);
    auto& out = rep.checks;

    // params
    {
        const SystemParams p0{0.4, 1.0, 2.0, 3.0, 0.05, 1.0};
        out.push_back(detail::bound_check("gamma_R_reference", "params", std::abs(gamma_renormalized(p0) - 0.448), tol.identity));
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            SystemParams p;
            p.omega = sampler.uniform(0.2, 2.0);
            p.gamma = 2.0 * p.omega * sampler.uniform(1.05, 4.0);
            p.hbar = sampler.uniform(0.5, 2.0);
            const auto ts = theta_star(p);
            if (!ts.value) {
                worst = std::numeric_limits<double>::infinity();
                break;
            }
            p.theta = *ts.value;
            worst = std::max(worst, std::abs(gamma_renormalized(p)) / p.gamma);
        }
        out.push_back(detail::bound_check("theta_star_cancels_damping", "params", worst, tol.identity, "200 overdamped sets"));
    }

    // transforms
    {
        double t2 = 0.0, s = 0.0;
        for (int i = 0; i < 200; ++i) {
            t2 = std::max(t2, t2_map(sampler.uniform(1.01, 10.0)).symplectic_defect());
            s = std::max(s, diag_transform(sampler.uniform(0.2, 5.0), sampler.uniform(0.2, 5.0), sampler.uniform(-3.2, 3.2)).symplectic_defect());
        }
        out.push_back(detail::bound_check("t2_symplectic", "transforms", t2, tol.symplectic));
        out.push_back(detail::bound_check("diag_transform_symplectic", "transforms", s, tol.symplectic));
        out.push_back(detail::bound_check("t1_lift_symplectic", "transforms", t1_lift().symplectic_defect(), tol.symplectic));
        const double theta = 0.05, hbar = 1.0;
        const double defect = xc_shift(theta, hbar).symplectic_defect();
        out.push_back({"xc_shift_not_canonical", "transforms", std::abs(defect - theta / hbar) < tol.symplectic, defect, tol.symplectic,
                       "defect must equal theta/hbar"});
    }

    // hamiltonians
    {
        double worst_inside = std::numeric_limits<double>::infinity();
        bool all_pd = true;
        for (int i = 0; i < 200; ++i) {
            const auto def = is_positive_definite(build_augmented(sampler.positive_regime()));
            all_pd = all_pd && def.positive;
            worst_inside = std::min(worst_inside, def.min_eigenvalue / def.norm);
        }
        out.push_back({"augmented_positive_inside_regime", "hamiltonians", all_pd, worst_inside, 0.0, "min eigenvalue / max |eigenvalue| over 200 sets"});
        double worst_witness = -std::numeric_limits<double>::infinity();
        bool all_witnessed = true;
        for (int i = 0; i < 200; ++i) {
            const auto def = is_positive_definite(build_augmented(sampler.outside_regime()));
            all_witnessed = all_witnessed && !def.positive && def.witness_value < 0.0;
            worst_witness = std::max(worst_witness, def.witness_value);
        }
        out.push_back({"augmented_indefinite_outside_regime", "hamiltonians", all_witnessed, worst_witness, 0.0,
                       "largest witness value z^T Q z over 200 sets (must be < 0)"});
    }

    // spectra: the seeded dual-route sweep
    {
        double agree = 0.0, companion = 0.0, lambda = 0.0, cross = 0.0, vieta = 0.0;
        std::size_t unavailable = 0;
        for (std::size_t i = 0; i < cfg.verify_samples; ++i) {
            const auto vp = validate(sampler.positive_regime());
            const auto d = derive(vp);
            const auto pi = pathintegral_spectrum(d);
            companion = std::max(companion, detail::companion_error(build_model(ModelVariant::nc_effective, vp, &d), pi));
            const cplx g12 = d.gamma1 * d.gamma2;
            vieta = std::max({vieta, relative_gap(pi.omega_plus_sq + pi.omega_minus_sq, d.nu1_sq + d.nu2_sq + g12),
                              relative_gap(pi.omega_plus_sq * pi.omega_minus_sq, d.nu1_sq * d.nu2_sq)});

            DerivedParams dc = d;
            if (cfg.inject_flip_gamma2) dc.gamma2 = -dc.gamma2;
            try {
                const auto route = canonical_spectrum(vp, dc);
                agree = std::max({agree, relative_gap(route.omega_tilde1, pi.omega_plus), relative_gap(route.omega_tilde2, pi.omega_minus)});
                lambda = std::max(lambda, route.lambda_residual);
                cross = std::max(cross, transported_residual(build_commuting(dc), route.ratio_ab, 1.0, route.u).relative());
            } catch (const DomainError&) {
                ++unavailable;
            }
        }
        if (unavailable > 0) agree = lambda = cross = std::numeric_limits<double>::infinity();
        const std::string note = std::to_string(cfg.verify_samples) + " seeded sets, " + std::to_string(unavailable) + " without a canonical route";
        out.push_back(detail::bound_check("dual_route_agreement", "spectra", agree, tol.agreement, note));
        out.push_back(detail::bound_check("companion_matrix_oracle", "spectra", companion, tol.companion, note));
        out.push_back(detail::bound_check("lambda_closure", "spectra", lambda, tol.lambda, note));
        out.push_back(detail::bound_check("congruence_cross_terms", "spectra", cross, tol.cross, note));
        out.push_back(detail::bound_check("vieta_relations", "spectra", vieta, tol.identity, note));
    }

    // spectra: eps = eta -> 0 limit
    {
        double endpoint = 0.0;
        bool monotone = true;
        for (double g : {0.0, 0.3, 0.8}) {
            for (double w : {0.7, 1.0, 1.6}) {
                for (double th : {0.0, 0.05, 0.2}) {
                    SystemParams p{g, w, 0.0, 0.0, th, 1.0};
                    const double gr = gamma_renormalized(p);
                    if (!(w * w > gr * gr / 4.0)) continue;
                    endpoint = std::max(endpoint, bateman_limit_row(p, 0.0).error);
                    monotone = monotone && bateman_limit_spectrum(p, cfg.limit_deltas).monotone_decreasing;
                }
            }
        }
        out.push_back(detail::bound_check("limit_endpoint_identity", "spectra", endpoint, tol.limit));
        out.push_back({"limit_convergence_monotone", "spectra", monotone, monotone ? 0.0 : 1.0, 0.0, "error decreases along limit.deltas"});
    }

    // dynamics
    {
        const auto vp = validate({0.4, 1.0, 2.0, 3.0, 0.05, 1.0});
        const auto d = derive(vp);
        const auto m = build_model(ModelVariant::nc_effective, vp, &d);
        const auto t = uniform_grid(60.0, 601);
        const Vec4 x0(1.0, 0.5, 0.0, -0.2);
        const auto exact = propagate(m, x0, t);
        const auto rk = integrate_rk4(m, x0, t);
        double prop = 0.0;
        for (std::size_t i = 0; i < exact.states.size(); ++i) prop = std::max(prop, (exact.states[i] - rk.states[i]).cwiseAbs().maxCoeff());
        out.push_back(detail::bound_check("propagation_vs_rk4", "dynamics", prop, tol.propagation));

        const auto dc = derive(validate({0.4, 1.0, 2.0, 3.0, 0.0, 1.0}));
        const auto vc = validate({0.4, 1.0, 2.0, 3.0, 0.0, 1.0});
        const double collapse = (build_model(ModelVariant::nc_effective, vc, &dc).A - build_model(ModelVariant::commutative_limit, vc, &dc).A)
                                    .cwiseAbs()
                                    .maxCoeff();
        out.push_back(detail::bound_check("commutative_collapse", "dynamics", collapse, 1e-14));

        // gamma = 0: damping comes from theta alone
        const SystemParams pn{0.0, 1.0, 0.0, 0.0, 0.1, 1.0};
        const auto mn = build_model(ModelVariant::bateman_renormalized, validate(pn));
        const auto tn = uniform_grid(250.0, 25001);
        const double expected = -pn.theta * pn.omega * pn.omega / (2.0 * pn.hbar);
        const double slope = fit_envelope(propagate(mn, Vec4(1.0, 0.0, 0.0, 0.0), tn), 0).rate;
        out.push_back(detail::bound_check("nc_induced_damping", "dynamics", std::abs(slope - expected) / std::abs(expected), tol.envelope));

        // theta = theta*: gamma_R vanishes and the amplitude holds
        SystemParams pf{4.0, 1.0, 0.0, 0.0, 0.0, 1.0};
        pf.theta = *theta_star(pf).value;
        const auto mf = build_model(ModelVariant::bateman_renormalized, validate(pf));
        const auto tf = uniform_grid(200.0 * std::numbers::pi / pf.omega, 20001);
        const auto trf = propagate(mf, Vec4(1.0, 0.0, 0.0, 0.0), tf);
        double drift = 0.0;
        for (const auto& s : trf.states)
            drift = std::max(drift, std::abs(std::hypot(s[0], s[2] / pf.omega) - 1.0));
        out.push_back(detail::bound_check("fine_tuned_amplitude_drift", "dynamics", drift, tol.drift, "100 periods at theta*"));

        const auto pi = pathintegral_spectrum(d);
        const auto tq = uniform_grid(400.0, 8192);
        const auto freqs = extract_frequencies(propagate(m, x0, tq));
        double ferr = std::numeric_limits<double>::infinity();
        if (freqs.size() == 2)
            ferr = std::max(std::abs(freqs[0] - pi.omega_plus.real()), std::abs(freqs[1] - pi.omega_minus.real()));
        out.push_back(detail::bound_check("frequency_extraction", "dynamics", ferr, tol.envelope, "Hann-windowed DFT peaks vs closed form"));
    }

    // pathintegral
    {
        const double mu = 2.0 * std::numbers::sqrt2;
        double eig = 0.0, pair = 0.0, ortho = 0.0;
        std::vector<std::size_t> sizes{1, 2, 3, 8, 64};
        if (cfg.verify_max_slices > 64) sizes.push_back(cfg.verify_max_slices);
        for (std::size_t n : sizes) {
            const auto c = CirculantModel::make(n, 0.01, mu, 0.05, 1.0);
            std::vector<cplx> closed;
            for (const auto& e : closed_form_eigs(c)) closed.push_back(e.value);
            eig = std::max(eig, multiset_distance(closed, dense_eigenvalues(build_matrix(c))));
            pair = std::max(pair, eigenpair_residual(c));
            ortho = std::max(ortho, orthonormality_defect(c));
        }
        out.push_back(detail::bound_check("circulant_eigenvalues", "pathintegral", eig, tol.circulant));
        out.push_back(detail::bound_check("circulant_eigenpairs", "pathintegral", pair, tol.circulant));
        out.push_back(detail::bound_check("fourier_orthonormality", "pathintegral", ortho, tol.circulant));

        const auto c = CirculantModel::make(64, 0.01, mu, 0.05, 1.0);
        CVector rhs(64);
        for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs(i) = cplx(sampler.uniform(-1, 1), sampler.uniform(-1, 1));
        const double inv = (build_matrix(c) * inverse_action(c, rhs) - rhs).norm();
        out.push_back(detail::bound_check("inverse_action_residual", "pathintegral", inv, tol.inverse));
    }

    rep.rejected_samples = sampler.rejected();

    std::set<std::string> covered;
    for (const auto& c : out) covered.insert(c.module);
    const char* required[] = {"params", "transforms", "hamiltonians", "spectra", "dynamics", "pathintegral"};
    std::string missing;
    for (const char* m : required) {
        if (!covered.contains(m)) missing += std::string(missing.empty() ? "" : ", ") + m;
    }
    out.push_back({"module_coverage", "cli", missing.empty(), static_cast<double>(missing.empty() ? 0 : 1), 0.0,
                   missing.empty() ? "every module exercised" : "missing: " + missing});
    return rep;
}

} // namespace ncbateman

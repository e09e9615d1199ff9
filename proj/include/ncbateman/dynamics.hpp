#pragma once

// Linear second-order models written in first-order form over the state
// (u1, u2, v1, v2) = (positions, velocities), exact propagation, and
// trajectory analysis (spectral peaks, log-envelope rates).
//
// Eigenvalue convention: the first-order matrix A has eigenvalues s with
// x(t) ~ exp(s t). A root lambda of the exp(i lambda t) ansatz corresponds
// to s = i lambda.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "errors.hpp"
#include "hamiltonians.hpp"
#include "linalg.hpp"
#include "params.hpp"

namespace ncbateman {

enum class ModelVariant {
    bateman,              ///< x'' + g x' + w^2 x = 0, y'' - g y' + w^2 y = 0
    augmented_xy,         ///< the same with eps / eta couplings between x and y
    nc_effective,         ///< noncommutative effective equations in x1', x2'
    commutative_limit,    ///< theta -> 0 of nc_effective
    nc_xy_prelimit,       ///< nc_effective mapped back to x, y
    bateman_renormalized, ///< Bateman pair with gamma -> gamma_R
};

enum class Frame { xy, x1x2 };

inline const char* to_string(ModelVariant v)
{
    switch (v) {
    case ModelVariant::bateman: return "BATEMAN";
    case ModelVariant::augmented_xy: return "AUGMENTED_XY";
    case ModelVariant::nc_effective: return "NC_EFFECTIVE";
    case ModelVariant::commutative_limit: return "COMMUTATIVE_LIMIT";
    case ModelVariant::nc_xy_prelimit: return "NC_XY_PRELIMIT";
    case ModelVariant::bateman_renormalized: return "BATEMAN_RENORMALIZED";
    }
    return "unknown";
}

inline std::optional<ModelVariant> parse_variant(std::string_view name)
{
    for (auto v : {ModelVariant::bateman, ModelVariant::augmented_xy, ModelVariant::nc_effective,
                   ModelVariant::commutative_limit, ModelVariant::nc_xy_prelimit, ModelVariant::bateman_renormalized}) {
        if (name == to_string(v)) return v;
    }
    return std::nullopt;
}

struct LinearModel {
    ModelVariant variant;
    Mat4 A;
    Frame frame;
};

/// M u'' + C u' + K u = 0  ->  [u; v]' = [[0, I], [-M^-1 K, -M^-1 C]] [u; v]
inline Mat4 first_order(const Mat2& mass, const Mat2& damping, const Mat2& stiffness)
{
    const double det = mass.determinant();
    if (std::abs(det) <= 1e-8) throw SingularityError("mass matrix [[1, eta], [eta, 1]] is singular (|1 - eta^2| <= 1e-8)");
    const Mat2 inv = mass.inverse();
    Mat4 A = Mat4::Zero();
    A.topRightCorner<2, 2>() = Mat2::Identity();
    A.bottomLeftCorner<2, 2>() = -inv * stiffness;
    A.bottomRightCorner<2, 2>() = -inv * damping;
    return A;
}

/// Unit-mass pair with opposite damping; gamma may be any sign here.
inline Mat4 bateman_matrix(double gamma, double omega)
{
    Mat2 C;
    C << gamma, 0.0, 0.0, -gamma;
    return first_order(Mat2::Identity(), C, omega * omega * Mat2::Identity());
}

inline LinearModel build_model(ModelVariant variant, const ValidatedParams& vp, const DerivedParams* d = nullptr)
{
    const SystemParams& p = vp.values();
    const double w_sq = p.omega * p.omega;
    auto need_derived = [&]() -> const DerivedParams& {
        if (d == nullptr) throw InvalidParameter(std::string(to_string(variant)) + " needs derived parameters");
        return *d;
    };

    switch (variant) {
    case ModelVariant::bateman: return {variant, bateman_matrix(p.gamma, p.omega), Frame::xy};

    case ModelVariant::augmented_xy: {
        Mat2 M, C, K;
        M << 1.0, p.eta, p.eta, 1.0;
        C << p.gamma, 0.0, 0.0, -p.gamma;
        K << w_sq, p.epsilon, p.epsilon, w_sq;
        return {variant, first_order(M, C, K), Frame::xy};
    }

    case ModelVariant::nc_effective: {
        const DerivedParams& dd = need_derived();
        const double g1 = detail::require_real(dd.gamma1, "gamma1");
        const double g2 = detail::require_real(dd.gamma2, "gamma2");
        Mat2 C, K;
        C << 0.0, g1, -g2, 0.0;
        K << detail::require_real(dd.nu1_sq, "nu1^2"), 0.0, 0.0, detail::require_real(dd.nu2_sq, "nu2^2");
        return {variant, first_order(Mat2::Identity(), C, K), Frame::x1x2};
    }

    case ModelVariant::commutative_limit: {
        const DerivedParams& dd = need_derived();
        const double mu = detail::require_real(dd.mu, "mu");
        Mat2 C, K;
        C << 0.0, p.gamma / mu, -p.gamma / mu, 0.0;
        K << detail::require_real(dd.nu1_sq, "nu1^2"), 0.0, 0.0, detail::require_real(dd.nu2_sq, "nu2^2");
        return {variant, first_order(Mat2::Identity(), C, K), Frame::x1x2};
    }

    case ModelVariant::nc_xy_prelimit: {
        const double damp = gamma_renormalized(p) - p.epsilon * p.eta * p.theta / p.hbar;
        const double cross = p.epsilon * p.theta / p.hbar - p.eta * p.theta * w_sq / p.hbar;
        Mat2 M, C, K;
        M << 1.0, p.eta, p.eta, 1.0;
        C << damp, cross, -cross, -damp;
        K << w_sq, p.epsilon, p.epsilon, w_sq;
        return {variant, first_order(M, C, K), Frame::xy};
    }

    case ModelVariant::bateman_renormalized:
        return {variant, bateman_matrix(gamma_renormalized(p), p.omega), Frame::xy};
    }
    throw InvalidParameter("unknown model variant");
}

/// Eigenvalues of A from a general dense solver, sorted by (real, imag).
inline std::vector<cplx> eigen_oracle(const Mat4& A)
{
    Eigen::EigenSolver<Mat4> es(A, false);
    std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

inline std::vector<cplx> eigen_oracle(const LinearModel& m) { return eigen_oracle(m.A); }

/// Monic characteristic polynomial coefficients {c0, c1, c2, c3} of
/// s^4 + c3 s^3 + c2 s^2 + c1 s + c0 (Faddeev-LeVerrier).
inline std::array<double, 4> characteristic_polynomial(const Mat4& A)
{
    std::array<double, 4> c{};
    Mat4 Mk = Mat4::Identity();
    double ck = 1.0;
    for (int k = 1; k <= 4; ++k) {
        const Mat4 AM = A * Mk;
        ck = -AM.trace() / k;
        c[4 - k] = ck;
        Mk = AM + ck * Mat4::Identity();
    }
    return c;
}

// ---------------------------------------------------------------------------
// Propagation

/// Anti-damped modes are followed only while their amplitude grows by at most this factor.
inline constexpr double kMaxGrowthFactor = 1e6;

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec4> states;
    ModelVariant variant = ModelVariant::bateman;
    Frame frame = Frame::xy;
    bool used_matrix_exponential = false;
    bool horizon_capped = false;
};

/// n samples on [0, t_end], both ends included.
inline std::vector<double> uniform_grid(double t_end, std::size_t n)
{
    if (n < 2 || !(t_end > 0.0)) throw InvalidParameter("grid needs at least two samples and t_end > 0");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

namespace detail {

inline void require_increasing(std::span<const double> t)
{
    if (t.empty()) throw InvalidParameter("time grid is empty");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i])) throw InvalidParameter("time grid contains non-finite values");
        if (i > 0 && !(t[i] > t[i - 1])) throw InvalidParameter("time grid must be strictly increasing");
    }
}

inline double growth_horizon(double rate)
{
    return rate > 0.0 ? std::log(kMaxGrowthFactor) / rate : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// x(t) = exp(A t) x0 on the grid. Uses the eigendecomposition when the
/// eigenvector matrix is well conditioned, the matrix exponential otherwise.
inline Trajectory propagate(const LinearModel& m, const Vec4& x0, std::span<const double> times)
{
    detail::require_increasing(times);
    Trajectory tr;
    tr.variant = m.variant;
    tr.frame = m.frame;

    Eigen::EigenSolver<Mat4> es(m.A);
    const Eigen::Matrix4cd V = es.eigenvectors();
    const Eigen::Vector4cd lambda = es.eigenvalues();
    const auto sv = V.jacobiSvd().singularValues();
    const double cond = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
    tr.used_matrix_exponential = !(cond < 1e8);

    Eigen::Vector4cd modal = Eigen::Vector4cd::Zero();
    double rate = 0.0;
    if (!tr.used_matrix_exponential) {
        modal = V.partialPivLu().solve(x0.cast<cplx>());
        const double scale = modal.cwiseAbs().maxCoeff();
        for (int j = 0; j < 4; ++j) {
            if (std::abs(modal(j)) > 1e-12 * scale) rate = std::max(rate, lambda(j).real());
        }
    } else {
        rate = lambda.real().maxCoeff();
    }
    if (x0.isZero(0.0)) rate = 0.0;
    const double horizon = detail::growth_horizon(rate);

    for (double t : times) {
        if (t > horizon) {
            tr.horizon_capped = true;
            break;
        }
        Vec4 x;
        if (!tr.used_matrix_exponential) {
            const Eigen::Vector4cd e = (lambda * t).array().exp().matrix().cwiseProduct(modal);
            x = (V * e).real();
        } else {
            const Mat4 At = m.A * t;
            x = At.exp() * x0;
        }
        tr.times.push_back(t);
        tr.states.push_back(x);
    }
    return tr;
}

/// Fixed-step classical Runge-Kutta, `substeps` steps between consecutive
/// grid points. Independent check on propagate().
inline Trajectory integrate_rk4(const LinearModel& m, const Vec4& x0, std::span<const double> times, int substeps = 64)
{
    detail::require_increasing(times);
    Trajectory tr;
    tr.variant = m.variant;
    tr.frame = m.frame;
    Vec4 x = x0;
    double t_prev = 0.0;
    for (double t : times) {
        const double h = (t - t_prev) / substeps;
        for (int s = 0; s < substeps && h != 0.0; ++s) {
            const Vec4 k1 = m.A * x;
            const Vec4 k2 = m.A * (x + 0.5 * h * k1);
            const Vec4 k3 = m.A * (x + 0.5 * h * k2);
            const Vec4 k4 = m.A * (x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t_prev = t;
        tr.times.push_back(t);
        tr.states.push_back(x);
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Trajectory analysis

struct PeakOptions {
    double relative_threshold = 0.05; ///< peaks below this fraction of the component maximum are ignored
    int zero_pad = 8;
};

namespace detail {

inline double uniform_step(std::span<const double> t)
{
    if (t.size() < 4) throw InvalidParameter("trajectory too short for spectral analysis");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt) throw InvalidParameter("frequency extraction needs a uniform grid");
    }
    return dt;
}

struct Peak {
    double frequency;
    double magnitude;
};

inline std::vector<Peak> component_peaks(const std::vector<double>& signal, double dt, const PeakOptions& opt)
{
    const std::size_t n = signal.size();
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(n);
    double spread = 0.0;
    for (double v : signal) spread = std::max(spread, std::abs(v - mean));
    if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) return {};

    std::size_t padded = 1;
    while (padded < n * static_cast<std::size_t>(opt.zero_pad)) padded <<= 1;
    std::vector<double> buf(padded, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        buf[i] = (signal[i] - mean) * hann;
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, buf);

    const std::size_t half = padded / 2;
    std::vector<double> mag(half);
    for (std::size_t k = 0; k < half; ++k) mag[k] = std::abs(spec[k]);
    const double top = *std::max_element(mag.begin(), mag.end());

    // Ignore the first two unpadded bins, where a non-oscillating drift leaks.
    const std::size_t first = std::max<std::size_t>(2, 2 * padded / n);
    std::vector<Peak> peaks;
    for (std::size_t k = first; k + 1 < half; ++k) {
        if (mag[k] < opt.relative_threshold * top || mag[k] < mag[k - 1] || mag[k] < mag[k + 1]) continue;
        // Parabolic refinement on log magnitude.
        const double a = std::log(mag[k - 1]), b = std::log(mag[k]), c = std::log(mag[k + 1]);
        const double den = a - 2.0 * b + c;
        const double shift = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
        const double bin = static_cast<double>(k) + shift;
        peaks.push_back({2.0 * std::numbers::pi * bin / (static_cast<double>(padded) * dt), mag[k] / top});
    }
    return peaks;
}

} // namespace detail

/// Angular frequencies of the dominant spectral peaks over all state
/// components (Hann window, zero padding, log-parabolic refinement),
/// merged across components and sorted descending.
inline std::vector<double> extract_frequencies(const Trajectory& tr, const PeakOptions& opt = {})
{
    const double dt = detail::uniform_step(tr.times);
    const std::size_t n = tr.times.size();
    const double resolution = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);

    std::vector<detail::Peak> all;
    std::vector<double> signal(n);
    for (int c = 0; c < 4; ++c) {
        for (std::size_t i = 0; i < n; ++i) signal[i] = tr.states[i][c];
        auto p = detail::component_peaks(signal, dt, opt);
        all.insert(all.end(), p.begin(), p.end());
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.magnitude > b.magnitude; });
    std::vector<double> out;
    for (const auto& p : all) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](double f) { return std::abs(f - p.frequency) < 2.0 * resolution; });
        if (!seen) out.push_back(p.frequency);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

struct EnvelopeFit {
    double rate = 0.0; ///< slope of log |u| at the extrema; -gamma/2 for a damped mode
    double intercept = 0.0;
    std::size_t extrema = 0;
};

/// Least-squares slope of log|u_c| through the refined local extrema of
/// state component c.
inline EnvelopeFit fit_envelope(const Trajectory& tr, int component)
{
    if (component < 0 || component > 3) throw InvalidParameter("component index must be 0..3");
    std::vector<double> ts, logs;
    const auto& s = tr.states;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double y0 = std::abs(s[i - 1][component]), y1 = std::abs(s[i][component]), y2 = std::abs(s[i + 1][component]);
        if (!(y1 > y0 && y1 >= y2)) continue;
        const double ym = s[i - 1][component], yc = s[i][component], yp = s[i + 1][component];
        const double den = ym - 2.0 * yc + yp;
        if (den == 0.0) continue;
        const double shift = 0.5 * (ym - yp) / den;
        const double vertex = yc - 0.25 * (ym - yp) * shift;
        const double h = tr.times[i + 1] - tr.times[i];
        ts.push_back(tr.times[i] + shift * h);
        logs.push_back(std::log(std::abs(vertex)));
    }
    if (ts.size() < 3) throw DomainError("fewer than three extrema: no envelope to fit");

    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += logs[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    EnvelopeFit f;
    f.rate = (n * stl - st * sl) / (n * stt - st * st);
    f.intercept = (sl - f.rate * st) / n;
    f.extrema = ts.size();
    return f;
}

} // namespace ncbateman

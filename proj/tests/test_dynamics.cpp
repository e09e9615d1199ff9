#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <ncbateman/dynamics.hpp>
#include <ncbateman/spectra.hpp>
#include <ncbateman/transforms.hpp>
#include <ncbateman/verify.hpp>

#include "support.hpp"

using namespace ncbateman;
using testsupport::kP0;

namespace {

LinearModel model(ModelVariant v, const SystemParams& p)
{
    const auto vp = validate(p);
    if (v == ModelVariant::nc_effective || v == ModelVariant::commutative_limit) {
        const auto d = derive(vp);
        return build_model(v, vp, &d);
    }
    return build_model(v, vp);
}

/// (x, y) state -> (x1', x2') state.
Mat4 frame_map(double eta) { return t2_state_map(eta) * t1_lift().matrix; }

double max_state_gap(const Trajectory& a, const Trajectory& b, const Mat4& map = Mat4::Identity())
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i) worst = std::max(worst, (map * a.states[i] - b.states[i]).cwiseAbs().maxCoeff());
    return worst;
}

} // namespace

TEST(Dynamics, VariantNames)
{
    for (auto v : {ModelVariant::bateman, ModelVariant::augmented_xy, ModelVariant::nc_effective, ModelVariant::commutative_limit,
                   ModelVariant::nc_xy_prelimit, ModelVariant::bateman_renormalized})
        EXPECT_EQ(parse_variant(to_string(v)), v);
    EXPECT_FALSE(parse_variant("nc_effective").has_value());
}

TEST(Dynamics, EffectiveEigenvaluesAreFrequencies)
{
    const auto d = derive(validate(kP0));
    const auto ev = eigen_oracle(model(ModelVariant::nc_effective, kP0));
    const auto s = pathintegral_spectrum(d);
    std::vector<double> im;
    for (const auto& z : ev) {
        EXPECT_LT(std::abs(z.real()), 1e-12);
        im.push_back(std::abs(z.imag()));
    }
    std::sort(im.begin(), im.end());
    EXPECT_NEAR(im[0], s.omega_minus.real(), 1e-12);
    EXPECT_NEAR(im[1], s.omega_minus.real(), 1e-12);
    EXPECT_NEAR(im[2], s.omega_plus.real(), 1e-12);
    EXPECT_NEAR(im[3], s.omega_plus.real(), 1e-12);
}

TEST(Dynamics, DecoupledEigenvalues)
{
    SystemParams p = kP0;
    p.gamma = 0.0;
    p.theta = 0.0;
    const auto ev = eigen_oracle(model(ModelVariant::nc_effective, p));
    std::vector<double> im;
    for (const auto& z : ev) im.push_back(z.imag());
    std::sort(im.begin(), im.end());
    EXPECT_NEAR(im[0], -std::sqrt(0.75), 1e-14);
    EXPECT_NEAR(im[1], -std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(im[2], std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(im[3], std::sqrt(0.75), 1e-14);
}

TEST(Dynamics, CharacteristicPolynomialOfEffectiveModel)
{
    ParameterSampler s(53);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = s.positive_regime();
        const auto d = derive(validate(p));
        const auto m = model(ModelVariant::nc_effective, p);
        EXPECT_NEAR(m.A.trace(), 0.0, 1e-14);
        const auto c = characteristic_polynomial(m.A);
        const double b = (d.nu1_sq + d.nu2_sq + d.gamma1 * d.gamma2).real();
        const double e = (d.nu1_sq * d.nu2_sq).real();
        EXPECT_NEAR(c[3], 0.0, 1e-12);
        EXPECT_NEAR(c[2], b, 1e-12 * std::abs(b));
        EXPECT_NEAR(c[1], 0.0, 1e-12);
        EXPECT_NEAR(c[0], e, 1e-12 * std::abs(e));
    }
}

TEST(Dynamics, CriticallyDampedBateman)
{
    const auto ev = eigen_oracle(bateman_matrix(2.0, 1.0));
    EXPECT_NEAR(ev[0].real(), -1.0, 1e-7);
    EXPECT_NEAR(ev[1].real(), -1.0, 1e-7);
    EXPECT_NEAR(ev[2].real(), 1.0, 1e-7);
    EXPECT_NEAR(ev[3].real(), 1.0, 1e-7);
    const auto c = characteristic_polynomial(bateman_matrix(2.0, 1.0));
    // (l^2 + 2l + 1)(l^2 - 2l + 1) = l^4 - 2 l^2 + 1
    EXPECT_NEAR(c[0], 1.0, 1e-14);
    EXPECT_NEAR(c[1], 0.0, 1e-14);
    EXPECT_NEAR(c[2], -2.0, 1e-14);
    EXPECT_NEAR(c[3], 0.0, 1e-14);
}

TEST(Dynamics, RenormalizedBatemanEigenvalues)
{
    const SystemParams p{0.2, 1.0, 0.0, 0.0, 0.1, 1.0};
    const auto ev = eigen_oracle(model(ModelVariant::bateman_renormalized, p));
    const double gr = 0.299, wd = std::sqrt(1.0 - gr * gr / 4.0);
    const cplx expected[] = {{-gr / 2, -wd}, {-gr / 2, wd}, {gr / 2, -wd}, {gr / 2, wd}};
    for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(ev[i] - expected[i]), 1e-14);
    // eigenvalue = i lambda for the renormalized roots
    const auto [lp, lm] = bateman_roots(gr, 1.0);
    EXPECT_LT(std::abs(cplx(0, 1) * lp - expected[1]), 1e-14);
    EXPECT_LT(std::abs(cplx(0, 1) * lm - expected[0]), 1e-14);
}

TEST(Dynamics, CommutativeCollapse)
{
    SystemParams p = kP0;
    p.theta = 0.0;
    EXPECT_LT((model(ModelVariant::nc_effective, p).A - model(ModelVariant::commutative_limit, p).A).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dynamics, PrelimitCollapsesToRenormalizedBateman)
{
    ParameterSampler s(59);
    for (int i = 0; i < 50; ++i) {
        const SystemParams p{s.uniform(0, 2), s.uniform(0.1, 2), 0.0, 0.0, s.uniform(0, 0.5), s.uniform(0.5, 2)};
        EXPECT_LT((model(ModelVariant::nc_xy_prelimit, p).A - model(ModelVariant::bateman_renormalized, p).A).cwiseAbs().maxCoeff(),
                  1e-14);
    }
}

TEST(Dynamics, PrelimitIsEffectiveModelInXYFrame)
{
    ParameterSampler s(61);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = s.positive_regime();
        const Mat4 S = frame_map(p.eta);
        const Mat4 moved = S * model(ModelVariant::nc_xy_prelimit, p).A * S.inverse();
        const Mat4 eff = model(ModelVariant::nc_effective, p).A;
        EXPECT_LT((moved - eff).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + eff.cwiseAbs().maxCoeff()));
    }
}

TEST(Dynamics, FrameConsistency)
{
    SystemParams p = kP0;
    p.theta = 0.0;
    const Mat4 S = frame_map(p.eta);
    const Vec4 x0(0.3, -0.7, 0.2, 0.1);
    const auto t = uniform_grid(40.0, 401);
    const auto xy = propagate(model(ModelVariant::augmented_xy, p), x0, t);
    const auto x12 = propagate(model(ModelVariant::commutative_limit, p), S * x0, t);
    EXPECT_LT(max_state_gap(xy, x12, S), 1e-8);
}

TEST(Dynamics, BatemanExchangeSymmetry)
{
    // swapping x and y is the same as gamma -> -gamma
    Mat4 P = Mat4::Zero();
    P(0, 1) = P(1, 0) = P(2, 3) = P(3, 2) = 1.0;
    const Mat4 A = bateman_matrix(0.3, 1.2);
    EXPECT_LT((P * A * P - bateman_matrix(-0.3, 1.2)).cwiseAbs().maxCoeff(), 1e-15);
    const auto a = eigen_oracle(A), b = eigen_oracle(bateman_matrix(-0.3, 1.2));
    for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-12);
}

TEST(Dynamics, CosineReference)
{
    const auto m = model(ModelVariant::bateman, {0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    const auto t = uniform_grid(30.0, 301);
    const auto tr = propagate(m, Vec4(1, 0, 0, 0), t);
    ASSERT_EQ(tr.states.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(tr.states[i][0], std::cos(t[i]), 1e-10);
        EXPECT_NEAR(tr.states[i][2], -std::sin(t[i]), 1e-10);
    }
}

TEST(Dynamics, ExactPropagationMatchesRungeKutta)
{
    ParameterSampler s(67);
    for (int i = 0; i < 20; ++i) {
        const SystemParams p = s.positive_regime();
        const auto t = uniform_grid(30.0, 301);
        const Vec4 x0(s.uniform(-1, 1), s.uniform(-1, 1), s.uniform(-1, 1), s.uniform(-1, 1));
        for (auto v : {ModelVariant::nc_effective, ModelVariant::augmented_xy, ModelVariant::nc_xy_prelimit}) {
            const auto m = model(v, p);
            EXPECT_LT(max_state_gap(propagate(m, x0, t), integrate_rk4(m, x0, t)), 1e-8) << to_string(v);
        }
    }
}

TEST(Dynamics, DefectiveMatrixUsesExponential)
{
    const auto m = model(ModelVariant::bateman, {2.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    const auto t = uniform_grid(5.0, 51);
    const Vec4 x0(1.0, 0.5, 0.0, 0.0);
    const auto tr = propagate(m, x0, t);
    EXPECT_TRUE(tr.used_matrix_exponential);
    EXPECT_LT(max_state_gap(tr, integrate_rk4(m, x0, t)), 1e-8);
    // critically damped x: (1 + t) e^{-t}
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(tr.states[i][0], (1 + t[i]) * std::exp(-t[i]), 1e-10);
}

TEST(Dynamics, EnvelopeOfBatemanModes)
{
    const double gamma = 0.5;
    const auto m = model(ModelVariant::bateman, {gamma, 1.0, 0.0, 0.0, 0.0, 1.0});
    const auto t = uniform_grid(50.0, 20001);
    const auto x_mode = propagate(m, Vec4(1, 0, 0, 0), t);
    EXPECT_NEAR(fit_envelope(x_mode, 0).rate, -gamma / 2, 1e-3 * gamma / 2);
    const auto y_mode = propagate(m, Vec4(0, 1, 0, 0), t);
    EXPECT_FALSE(y_mode.horizon_capped);
    EXPECT_NEAR(fit_envelope(y_mode, 1).rate, gamma / 2, 1e-3 * gamma / 2);
}

TEST(Dynamics, GrowthCap)
{
    const double gamma = 0.5;
    const auto m = model(ModelVariant::bateman, {gamma, 1.0, 0.0, 0.0, 0.0, 1.0});
    const auto t = uniform_grid(200.0, 2001);
    const auto tr = propagate(m, Vec4(0, 1, 0, 0), t);
    EXPECT_TRUE(tr.horizon_capped);
    EXPECT_LT(tr.states.size(), t.size());
    EXPECT_LE(tr.times.back(), std::log(kMaxGrowthFactor) / (gamma / 2));
    // the decaying x-mode never triggers the cap
    EXPECT_FALSE(propagate(m, Vec4(1, 0, 0, 0), t).horizon_capped);
}

TEST(Dynamics, ZeroStateStaysZero)
{
    const auto tr = propagate(model(ModelVariant::bateman, {0.5, 1.0, 0.0, 0.0, 0.0, 1.0}), Vec4::Zero(), uniform_grid(500.0, 101));
    EXPECT_EQ(tr.states.size(), 101u);
    for (const auto& s : tr.states) EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dynamics, GridChecks)
{
    const auto m = model(ModelVariant::bateman, {0.5, 1.0, 0.0, 0.0, 0.0, 1.0});
    const std::vector<double> bad{0.0, 1.0, 1.0};
    EXPECT_THROW(propagate(m, Vec4::Zero(), bad), InvalidParameter);
    EXPECT_THROW(uniform_grid(1.0, 1), InvalidParameter);
    EXPECT_THROW(build_model(ModelVariant::nc_effective, validate(kP0)), InvalidParameter);
    SystemParams p = kP0;
    p.eta = 1.0;
    EXPECT_THROW(build_model(ModelVariant::augmented_xy, validate(p)), SingularityError);
}

TEST(Dynamics, CosineFrequency)
{
    const auto m = model(ModelVariant::bateman, {0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    const auto tr = propagate(m, Vec4(1, 0, 0, 0), uniform_grid(40.0 * std::numbers::pi, 4096));
    const auto f = extract_frequencies(tr);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_NEAR(f[0], 1.0, 1e-3);
}

TEST(Dynamics, EffectiveModelFrequencies)
{
    const auto m = model(ModelVariant::nc_effective, kP0);
    const auto tr = propagate(m, Vec4(1.0, 0.5, 0.0, -0.2), uniform_grid(400.0, 8192));
    const auto f = extract_frequencies(tr);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_NEAR(f[0], testsupport::p0::omega_plus, 1e-3);
    EXPECT_NEAR(f[1], testsupport::p0::omega_minus, 1e-3);
}

TEST(Dynamics, ConstantTrajectoryHasNoPeaks)
{
    Trajectory tr;
    tr.times = uniform_grid(10.0, 256);
    tr.states.assign(256, Vec4(1.0, 2.0, 0.0, 0.0));
    EXPECT_TRUE(extract_frequencies(tr).empty());
}

TEST(Dynamics, FrequencyExtractionNeedsUniformGrid)
{
    Trajectory tr;
    for (int i = 0; i < 64; ++i) {
        tr.times.push_back(i * i * 0.01);
        tr.states.push_back(Vec4(std::cos(i), 0, 0, 0));
    }
    EXPECT_THROW(extract_frequencies(tr), InvalidParameter);
}

TEST(Dynamics, DampingInducedByThetaAlone)
{
    const SystemParams p{0.0, 1.0, 0.0, 0.0, 0.1, 1.0};
    const auto tr = propagate(model(ModelVariant::bateman_renormalized, p), Vec4(1, 0, 0, 0), uniform_grid(250.0, 25001));
    const double expected = -0.1 / 2.0;
    EXPECT_NEAR(fit_envelope(tr, 0).rate, expected, 1e-3 * std::abs(expected));
}

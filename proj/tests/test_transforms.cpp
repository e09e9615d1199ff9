#include <cmath>

#include <gtest/gtest.h>

#include <ncbateman/transforms.hpp>
#include <ncbateman/verify.hpp>

using namespace ncbateman;

TEST(Transforms, T1Block)
{
    const Mat2 T = t1_block();
    EXPECT_LT((T * T.transpose() - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((T - T.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(T.determinant(), -1.0, 1e-15);
    const Vec2 xy(1.0, 0.0);
    EXPECT_NEAR(t1_config(xy)(0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(t1_config(xy)(1), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_TRUE(t1_lift().canonical);
    EXPECT_LT(t1_lift().symplectic_defect(), 1e-12);
}

TEST(Transforms, T2IsSymplectic)
{
    ParameterSampler s(3);
    for (int i = 0; i < 500; ++i) {
        const double eta = s.uniform(1.0001, 50.0);
        const auto m = t2_map(eta);
        EXPECT_TRUE(m.canonical);
        EXPECT_LT(m.symplectic_defect(), 1e-12) << "eta = " << eta;
    }
}

TEST(Transforms, T2Scale)
{
    EXPECT_NEAR(t2_scale(3.0), std::pow(2.0, 0.25), 1e-15);
    EXPECT_THROW(t2_scale(1.0), DomainError);
    EXPECT_THROW(t2_scale(0.5), DomainError);
    const PhasePoint z(1.0, 1.0, 1.0, 1.0);
    const PhasePoint w = t2_phase(z, 3.0);
    EXPECT_NEAR(w(0) * w(2), 1.0, 1e-15); // x1 p1 preserved
    EXPECT_NEAR(w(1) * w(3), 1.0, 1e-15);
}

TEST(Transforms, DiagTransformIsSymplectic)
{
    ParameterSampler s(5);
    for (int i = 0; i < 500; ++i) {
        const auto m = diag_transform(s.uniform(-4, 4), s.uniform(0.1, 4), s.uniform(-7, 7));
        EXPECT_LT(m.symplectic_defect(), 1e-12);
    }
    EXPECT_THROW(diag_transform(0.0, 1.0, 0.3), DomainError);
    EXPECT_THROW(diag_transform(1.0, 0.0, 0.3), DomainError);
}

TEST(Transforms, DiagTransformAtZeroAngleIsScaling)
{
    const Mat4 M = diag_transform(2.0, 0.5, 0.0).matrix;
    Mat4 expected = Mat4::Zero();
    expected.diagonal() << 2.0, 2.0, 0.5, 0.5;
    EXPECT_LT((M - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transforms, ShiftIsNotCanonical)
{
    for (double theta : {1e-3, 0.05, 0.7}) {
        for (double hbar : {0.5, 1.0, 2.0}) {
            const auto m = xc_shift(theta, hbar);
            EXPECT_FALSE(m.canonical);
            EXPECT_NEAR(m.symplectic_defect(), theta / hbar, 1e-15);
            const Mat4 J = symplectic_form();
            // brackets of the shifted coordinates: {X1, X2} = theta/hbar
            const Mat4 B = m.matrix * J * m.matrix.transpose() - J;
            EXPECT_NEAR(std::abs(B(0, 1)), theta / hbar, 1e-15);
            EXPECT_NEAR(B(0, 1), -B(1, 0), 1e-15);
            EXPECT_EQ(B.bottomRows<2>().cwiseAbs().maxCoeff(), 0.0);
        }
    }
    const auto identity = xc_shift(0.0, 1.0);
    EXPECT_TRUE(identity.canonical);
    EXPECT_EQ(identity.symplectic_defect(), 0.0);
    EXPECT_THROW(xc_shift(0.1, 0.0), InvalidParameter);
}

TEST(Transforms, MapKindNames)
{
    EXPECT_STREQ(to_string(t1_lift().kind), "T1_config");
    EXPECT_STREQ(to_string(t2_map(2.0).kind), "T2_phase");
    EXPECT_STREQ(to_string(diag_transform(1, 1, 0).kind), "S_diag");
    EXPECT_STREQ(to_string(xc_shift(0.1, 1).kind), "Xc_shift");
}

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <ncbateman/pathintegral.hpp>
#include <ncbateman/verify.hpp>

#include "support.hpp"

using namespace ncbateman;

namespace {

const double kMu = 2.0 * std::numbers::sqrt2;

std::vector<cplx> closed_values(const CirculantModel& c)
{
    std::vector<cplx> v;
    for (const auto& e : closed_form_eigs(c)) v.push_back(e.value);
    return v;
}

} // namespace

TEST(PathIntegral, StepConstant)
{
    const auto c = CirculantModel::make(4, 0.01, kMu, 0.05, 1.0);
    EXPECT_NEAR(c.sigma.real(), -0.025, 1e-17);
    EXPECT_NEAR(c.sigma.imag(), -0.001767766952966368811, 1e-17);
    EXPECT_DOUBLE_EQ(c.offdiag, 0.025);
    EXPECT_THROW(CirculantModel::make(0, 0.01, kMu, 0.05, 1.0), InvalidParameter);
    EXPECT_THROW(CirculantModel::make(4, 0.01, 0.0, 0.05, 1.0), InvalidParameter);
}

TEST(PathIntegral, FromDerivedParameters)
{
    const auto vp = validate(testsupport::kP0);
    const auto c = CirculantModel::make(8, 0.01, vp, derive(vp));
    EXPECT_NEAR(c.sigma.imag(), -0.001767766952966368811, 1e-17);
    SystemParams p = testsupport::kP0;
    p.eta = 0.5;
    const auto outside = validate(p);
    EXPECT_THROW(CirculantModel::make(8, 0.01, outside, derive(outside)), DomainError);
}

TEST(PathIntegral, MatrixHasWrapAroundEntry)
{
    const auto c = CirculantModel::make(5, 0.01, kMu, 0.05, 1.0);
    const CMatrix M = build_matrix(c);
    EXPECT_EQ(M(4, 0), cplx(c.offdiag, 0.0));
    EXPECT_EQ(M(0, 1), cplx(c.offdiag, 0.0));
    EXPECT_EQ(M(1, 0), cplx(0.0, 0.0));
    for (int i = 0; i < 5; ++i) EXPECT_EQ(M(i, i), c.sigma);
    // circulant: every row is a cyclic shift of the first
    for (int i = 1; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_EQ(M(i, j), M(0, (j - i + 5) % 5));
}

TEST(PathIntegral, SmallSizes)
{
    const auto c1 = CirculantModel::make(1, 0.01, kMu, 0.05, 1.0);
    EXPECT_EQ(build_matrix(c1)(0, 0), c1.sigma + c1.offdiag);
    EXPECT_LT(std::abs(closed_form_eigs(c1)[0].value - (c1.sigma + c1.offdiag)), 1e-16);

    const auto c2 = CirculantModel::make(2, 0.01, kMu, 0.05, 1.0);
    const auto e2 = closed_values(c2);
    EXPECT_LT(std::abs(e2[0] - (c2.sigma + c2.offdiag)), 1e-16);
    EXPECT_LT(std::abs(e2[1] - (c2.sigma - c2.offdiag)), 1e-16);
}

TEST(PathIntegral, ClosedFormMatchesDenseSolver)
{
    for (std::size_t n : {1, 2, 3, 8, 64, 512}) {
        const auto c = CirculantModel::make(n, 0.01, kMu, 0.05, 1.0);
        EXPECT_LT(multiset_distance(closed_values(c), dense_eigenvalues(build_matrix(c))), 1e-12) << "N = " << n;
    }
}

TEST(PathIntegral, EigenpairsAndOrthonormality)
{
    for (std::size_t n : {3, 8, 128}) {
        const auto c = CirculantModel::make(n, 0.01, kMu, 0.05, 1.0);
        EXPECT_LT(eigenpair_residual(c), 1e-12);
        EXPECT_LT(orthonormality_defect(c), 1e-12);
    }
}

TEST(PathIntegral, ZeroModeIsUniform)
{
    const auto c = CirculantModel::make(16, 0.01, kMu, 0.05, 1.0);
    const auto e = closed_form_eigs(c)[0];
    EXPECT_LT(std::abs(e.value - (c.sigma + c.offdiag)), 1e-16);
    for (Eigen::Index i = 0; i < e.vector.size(); ++i) EXPECT_LT(std::abs(e.vector(i) - 0.25), 1e-16);
}

TEST(PathIntegral, DegenerateExactlyWithoutTheta)
{
    const auto commuting = CirculantModel::make(16, 0.01, kMu, 0.0, 1.0);
    for (const auto& v : closed_values(commuting)) EXPECT_EQ(v, commuting.sigma);

    const auto nc = CirculantModel::make(16, 0.01, kMu, 0.05, 1.0);
    const auto v = closed_values(nc);
    double gap = 1e300;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) gap = std::min(gap, std::abs(v[i] - v[j]));
    EXPECT_GT(gap, 1e-3);
}

TEST(PathIntegral, InverseAction)
{
    const auto c = CirculantModel::make(64, 0.01, kMu, 0.05, 1.0);
    ParameterSampler s(71);
    CVector rhs(64);
    for (Eigen::Index i = 0; i < 64; ++i) rhs(i) = cplx(s.uniform(-1, 1), s.uniform(-1, 1));
    const CMatrix M = build_matrix(c);
    const CVector x = inverse_action(c, rhs);
    EXPECT_LT((M * x - rhs).norm(), 1e-10);
    EXPECT_LT((x - M.partialPivLu().solve(rhs)).norm(), 1e-10);

    const auto e = closed_form_eigs(c)[5];
    EXPECT_LT((inverse_action(c, e.vector) - e.vector / e.value).norm(), 1e-12);

    const auto scalar = CirculantModel::make(8, 0.01, kMu, 0.0, 1.0);
    const CVector r = CVector::Ones(8);
    EXPECT_LT((inverse_action(scalar, r) - r / scalar.sigma).norm(), 1e-12);
    EXPECT_THROW(inverse_action(c, CVector::Ones(3)), InvalidParameter);
}

TEST(PathIntegral, SingularMatrixRejected)
{
    CirculantModel c;
    c.slices = 2;
    c.offdiag = 0.5;
    c.sigma = 0.5; // lambda_1 = sigma - offdiag = 0
    EXPECT_THROW(inverse_action(c, CVector::Ones(2)), SingularityError);
}

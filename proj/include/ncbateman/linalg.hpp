#pragma once

#include <Eigen/Dense>

namespace ncbateman {

/// Phase-space ordering everywhere: (x1, x2, p1, p2).
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using PhasePoint = Vec4;

/// Standard symplectic form in (x1, x2, p1, p2) ordering.
inline Mat4 symplectic_form()
{
    Mat4 J = Mat4::Zero();
    J.topRightCorner<2, 2>() = Mat2::Identity();
    J.bottomLeftCorner<2, 2>() = -Mat2::Identity();
    return J;
}

/// max |(M^T J M - J)_ij|
inline double symplectic_defect(const Mat4& M)
{
    const Mat4 J = symplectic_form();
    return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace ncbateman

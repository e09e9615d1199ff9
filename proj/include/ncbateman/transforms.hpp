#pragma once

// Coordinate and phase-space maps: the x/y -> x1/x2 rotation, the mass
// equalizing rescale, the 4x4 block rotation used to diagonalize the
// commuting-coordinate Hamiltonian, and the (non-canonical) shift between
// noncommutative and commuting position operators.

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace ncbateman {

enum class MapKind { t1_config, t2_phase, s_diag, xc_shift };

inline const char* to_string(MapKind k)
{
    switch (k) {
    case MapKind::t1_config: return "T1_config";
    case MapKind::t2_phase: return "T2_phase";
    case MapKind::s_diag: return "S_diag";
    case MapKind::xc_shift: return "Xc_shift";
    }
    return "unknown";
}

struct CanonicalMap {
    Mat4 matrix;
    MapKind kind;
    /// False only for the position shift, which does not preserve brackets.
    bool canonical = true;

    Vec4 apply(const Vec4& z) const { return matrix * z; }
    double symplectic_defect() const { return ncbateman::symplectic_defect(matrix); }
};

/// (x, y) -> ((x+y)/sqrt2, (x-y)/sqrt2). Symmetric, orthogonal, det = -1.
inline Mat2 t1_block()
{
    const double s = 1.0 / std::numbers::sqrt2;
    Mat2 T;
    T << s, s, s, -s;
    return T;
}

inline Vec2 t1_config(const Vec2& v) { return t1_block() * v; }

/// T1 on positions and the same block on momenta (or velocities).
inline CanonicalMap t1_lift()
{
    Mat4 M = Mat4::Zero();
    M.topLeftCorner<2, 2>() = t1_block();
    M.bottomRightCorner<2, 2>() = t1_block();
    return {M, MapKind::t1_config, true};
}

/// ((eta+1)/(eta-1))^(1/4)
inline double t2_scale(double eta)
{
    if (!(eta > 1.0)) throw DomainError("T2 requires eta > 1");
    return std::pow((eta + 1.0) / (eta - 1.0), 0.25);
}

/// diag(c, 1/c, 1/c, c) on (x1, x2, p1, p2).
inline CanonicalMap t2_map(double eta)
{
    const double c = t2_scale(eta);
    Mat4 M = Mat4::Zero();
    M.diagonal() << c, 1.0 / c, 1.0 / c, c;
    return {M, MapKind::t2_phase, true};
}

inline PhasePoint t2_phase(const PhasePoint& pt, double eta) { return t2_map(eta).apply(pt); }

/// The velocity counterpart of T2: velocities scale like their positions,
/// so the (u1, u2, v1, v2) state map is diag(c, 1/c, c, 1/c).
inline Mat4 t2_state_map(double eta)
{
    const double c = t2_scale(eta);
    Mat4 M = Mat4::Zero();
    M.diagonal() << c, 1.0 / c, c, 1.0 / c;
    return M;
}

/// Block rotation mapping (q1, q2, pi1, pi2) to (X1c, X2c, P1, P2):
///   X1c = a cos u q1 + sin u / b pi2      P1 = -b sin u q2 + cos u / a pi1
///   X2c = a cos u q2 + sin u / b pi1      P2 = -b sin u q1 + cos u / a pi2
inline CanonicalMap diag_transform(double a, double b, double u)
{
    if (a == 0.0 || b == 0.0) throw DomainError("diag_transform requires a != 0 and b != 0");
    const double c = std::cos(u);
    const double s = std::sin(u);
    Mat4 M;
    // clang-format off
    M <<  a * c,      0.0,        0.0,     s / b,
          0.0,        a * c,      s / b,   0.0,
          0.0,       -b * s,      c / a,   0.0,
         -b * s,      0.0,        0.0,     c / a;
    // clang-format on
    return {M, MapKind::s_diag, true};
}

/// (X1c, X2c, P1, P2) -> (X1, X2, P1, P2) with X_i = X_i^c - theta/(2 hbar) eps_ij P_j.
/// Not canonical: M^T J M - J has entries +-theta/hbar.
inline CanonicalMap xc_shift(double theta, double hbar)
{
    if (!(hbar > 0.0)) throw InvalidParameter("hbar must be > 0");
    const double k = theta / (2.0 * hbar);
    Mat4 M = Mat4::Identity();
    M(0, 3) = -k;
    M(1, 2) = k;
    return {M, MapKind::xc_shift, theta == 0.0};
}

} // namespace ncbateman

#pragma once

// Small-strain tensor algebra in orthonormal (Mandel) 6-vector notation.
//
// Component order of a SymMat: 11, 22, 33, 23, 13, 12; the three shear slots
// carry a factor sqrt(2), so the Euclidean inner product of two 6-vectors
// equals the double contraction of the tensors and stiffness transposes are
// tensor adjoints.

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

namespace dmn {

using SymMat = Eigen::Matrix<double, 6, 1>;
using Stiffness = Eigen::Matrix<double, 6, 6>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// Maps a jump vector a to the Mandel vector of sym(a (x) n).
using JumpOperator = Eigen::Matrix<double, 6, 3>;

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kPi = 3.14159265358979323846;

/// Tensor index pair (i, j) of each Mandel slot.
inline constexpr std::array<std::array<int, 2>, 6> kMandelPairs{
    {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

/// Mandel scale factor of slot I: 1 for normal, sqrt(2) for shear components.
inline constexpr double mandel_factor(int slot) { return slot < 3 ? 1.0 : kSqrt2; }

SymMat to_mandel(const Mat3& tensor);
Mat3 from_mandel(const SymMat& v);

/// 6x6 Mandel matrix of a fourth-order tensor with minor symmetries, given as
/// a component callback t(i, j, k, l).
template <typename F>
Stiffness mandel_from_tensor(F&& t) {
  Stiffness m;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      m(a, b) = mandel_factor(a) * mandel_factor(b) *
                t(kMandelPairs[a][0], kMandelPairs[a][1], kMandelPairs[b][0], kMandelPairs[b][1]);
    }
  }
  return m;
}

/// Spherical and deviatoric projectors (P1, P2) on symmetric tensors.
std::pair<Stiffness, Stiffness> iso_projectors();

Stiffness isotropic_stiffness(double bulk, double shear);
Stiffness isotropic_from_young(double young, double poisson);

/// Lamination projector P(n); throws PreconditionError unless |n| = 1 within 1e-12.
Stiffness lamination_projector(const Vec3& n);

namespace detail {
/// P(n) evaluated for any n (no unit-length check); used by adjoints.
Stiffness lamination_projector_raw(const Vec3& n);
/// Partial derivatives dP/dn_k, k = 0..2, of the polynomial P(n).
std::array<Stiffness, 3> lamination_projector_derivative(const Vec3& n);
}  // namespace detail

JumpOperator jump_operator(const Vec3& n);

/// Mandel representation R(Q) of eps -> Q eps Q^T; orthogonal for orthogonal Q.
Stiffness rotation_operator(const Mat3& q);

/// R(Q) C R(Q)^T; throws PreconditionError if Q^T Q != I within 1e-10.
Stiffness rotate_stiffness(const Stiffness& c, const Mat3& q);

/// Rodrigues rotation about a unit axis.
Mat3 axis_angle_rotation(const Vec3& axis, double angle);

bool is_symmetric(const Stiffness& c, double rel_tol = 1e-12);
bool is_positive_definite(const Stiffness& c);

// ---------------------------------------------------------------------------
// Fiber orientation triangle

/// The two largest eigenvalues of a second-order fiber orientation tensor.
struct OrientationPoint {
  double l1 = 1.0;
  double l2 = 0.0;
  double l3() const { return 1.0 - l1 - l2; }
};

/// Barycentric coordinates w.r.t. the corners (1,0), (1/3,1/3), (1/2,1/2).
struct Bary {
  double phi1 = 1.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
};

/// Largest violation of lambda1 >= lambda2 >= lambda3 >= 0 (0 when inside).
double triangle_violation(const OrientationPoint& p);

/// Returns p, projected onto the triangle when the violation is below 1e-8;
/// throws PreconditionError for larger violations.
OrientationPoint checked_orientation(const OrientationPoint& p);

Bary to_barycentric(const OrientationPoint& p);
OrientationPoint from_barycentric(const Bary& b);

enum class InterpKind { Linear, Trilinear, Quadratic };

int shape_count(InterpKind kind);
std::string_view to_string(InterpKind kind);
/// Accepts "linear", "trilinear" (or "tri-linear"), "quadratic".
InterpKind parse_interp_kind(std::string_view name);

Eigen::VectorXd shape_functions(const Bary& b, InterpKind kind);

struct OrientationFrame {
  Mat3 rotation;  // columns: eigenvectors, det = +1
  OrientationPoint point;
};

/// Eigen decomposition A2 = Q diag(l1, l2, l3) Q^T with descending eigenvalues.
OrientationFrame orientation_tensor_eig(const Mat3& a2);

}  // namespace dmn

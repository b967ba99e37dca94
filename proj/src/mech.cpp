#include "dmn/mech.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "dmn/error.hpp"

namespace dmn {

namespace {
inline double delta(int i, int j) { return i == j ? 1.0 : 0.0; }
}  // namespace

SymMat to_mandel(const Mat3& t) {
  SymMat v;
  v << t(0, 0), t(1, 1), t(2, 2), kSqrt2 * 0.5 * (t(1, 2) + t(2, 1)),
      kSqrt2 * 0.5 * (t(0, 2) + t(2, 0)), kSqrt2 * 0.5 * (t(0, 1) + t(1, 0));
  return v;
}

Mat3 from_mandel(const SymMat& v) {
  const double s = 1.0 / kSqrt2;
  Mat3 t;
  t << v[0], s * v[5], s * v[4],  //
      s * v[5], v[1], s * v[3],   //
      s * v[4], s * v[3], v[2];
  return t;
}

std::pair<Stiffness, Stiffness> iso_projectors() {
  SymMat identity = SymMat::Zero();
  identity.head<3>().setOnes();
  Stiffness p1 = identity * identity.transpose() / 3.0;
  Stiffness p2 = Stiffness::Identity() - p1;
  return {p1, p2};
}

Stiffness isotropic_stiffness(double bulk, double shear) {
  auto [p1, p2] = iso_projectors();
  return 3.0 * bulk * p1 + 2.0 * shear * p2;
}

Stiffness isotropic_from_young(double young, double poisson) {
  const double bulk = young / (3.0 * (1.0 - 2.0 * poisson));
  const double shear = young / (2.0 * (1.0 + poisson));
  return isotropic_stiffness(bulk, shear);
}

namespace detail {

Stiffness lamination_projector_raw(const Vec3& n) {
  return mandel_from_tensor([&](int m, int k, int o, int p) {
    return 0.5 * (n[m] * delta(k, o) * n[p] + n[k] * delta(m, o) * n[p] + n[m] * delta(k, p) * n[o] +
                  n[k] * delta(m, p) * n[o]) -
           n[m] * n[k] * n[o] * n[p];
  });
}

std::array<Stiffness, 3> lamination_projector_derivative(const Vec3& n) {
  std::array<Stiffness, 3> d;
  for (int q = 0; q < 3; ++q) {
    d[q] = mandel_from_tensor([&](int m, int k, int o, int p) {
      const double sym = delta(m, q) * delta(k, o) * n[p] + n[m] * delta(k, o) * delta(p, q) +
                         delta(k, q) * delta(m, o) * n[p] + n[k] * delta(m, o) * delta(p, q) +
                         delta(m, q) * delta(k, p) * n[o] + n[m] * delta(k, p) * delta(o, q) +
                         delta(k, q) * delta(m, p) * n[o] + n[k] * delta(m, p) * delta(o, q);
      const double quartic = delta(m, q) * n[k] * n[o] * n[p] + n[m] * delta(k, q) * n[o] * n[p] +
                             n[m] * n[k] * delta(o, q) * n[p] + n[m] * n[k] * n[o] * delta(p, q);
      return 0.5 * sym - quartic;
    });
  }
  return d;
}

}  // namespace detail

Stiffness lamination_projector(const Vec3& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "lamination_projector: direction must be a unit vector, |n| = " << n.norm();
    throw PreconditionError(msg.str());
  }
  return detail::lamination_projector_raw(n);
}

JumpOperator jump_operator(const Vec3& n) {
  JumpOperator op;
  for (int k = 0; k < 3; ++k) {
    const Vec3 a = Vec3::Unit(k);
    const Mat3 s = 0.5 * (a * n.transpose() + n * a.transpose());
    op.col(k) = to_mandel(s);
  }
  return op;
}

Stiffness rotation_operator(const Mat3& q) {
  Stiffness r;
  for (int j = 0; j < 6; ++j) {
    const Mat3 e = from_mandel(SymMat::Unit(j));
    r.col(j) = to_mandel(q * e * q.transpose());
  }
  return r;
}

Stiffness rotate_stiffness(const Stiffness& c, const Mat3& q) {
  if ((q.transpose() * q - Mat3::Identity()).norm() > 1e-10) {
    throw PreconditionError("rotate_stiffness: Q is not orthogonal");
  }
  const Stiffness r = rotation_operator(q);
  return r * c * r.transpose();
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 cross;
  cross << 0.0, -axis[2], axis[1], axis[2], 0.0, -axis[0], -axis[1], axis[0], 0.0;
  return c * Mat3::Identity() + s * cross + (1.0 - c) * axis * axis.transpose();
}

bool is_symmetric(const Stiffness& c, double rel_tol) {
  const double scale = std::max(c.norm(), 1e-300);
  return (c - c.transpose()).norm() <= rel_tol * scale;
}

bool is_positive_definite(const Stiffness& c) {
  Eigen::LLT<Stiffness> llt(0.5 * (c + c.transpose()));
  return llt.info() == Eigen::Success;
}

// ---------------------------------------------------------------------------

double triangle_violation(const OrientationPoint& p) {
  const double l3 = p.l3();
  return std::max({p.l2 - p.l1, l3 - p.l2, -l3, 0.0});
}

OrientationPoint checked_orientation(const OrientationPoint& p) {
  const double violation = triangle_violation(p);
  if (violation == 0.0) return p;
  if (!(violation <= 1e-8)) {
    std::ostringstream msg;
    msg << "orientation (" << p.l1 << ", " << p.l2
        << ") lies outside the fiber orientation triangle (violation " << violation << ")";
    throw PreconditionError(msg.str());
  }
  Bary b = to_barycentric(p);
  b.phi1 = std::max(b.phi1, 0.0);
  b.phi2 = std::max(b.phi2, 0.0);
  b.phi3 = std::max(b.phi3, 0.0);
  const double sum = b.phi1 + b.phi2 + b.phi3;
  b.phi1 /= sum;
  b.phi2 /= sum;
  b.phi3 /= sum;
  return from_barycentric(b);
}

Bary to_barycentric(const OrientationPoint& p) {
  // Closed-form inverse of the corner map; phi2 = 3 lambda3.
  Bary b;
  b.phi1 = p.l1 - p.l2;
  b.phi3 = 2.0 * (p.l1 + 2.0 * p.l2 - 1.0);
  b.phi2 = 1.0 - b.phi1 - b.phi3;
  return b;
}

OrientationPoint from_barycentric(const Bary& b) {
  return {b.phi1 + b.phi2 / 3.0 + b.phi3 / 2.0, b.phi2 / 3.0 + b.phi3 / 2.0};
}

int shape_count(InterpKind kind) {
  switch (kind) {
    case InterpKind::Linear: return 3;
    case InterpKind::Trilinear: return 4;
    case InterpKind::Quadratic: return 6;
  }
  return 0;
}

std::string_view to_string(InterpKind kind) {
  switch (kind) {
    case InterpKind::Linear: return "linear";
    case InterpKind::Trilinear: return "trilinear";
    case InterpKind::Quadratic: return "quadratic";
  }
  return "unknown";
}

InterpKind parse_interp_kind(std::string_view name) {
  if (name == "linear") return InterpKind::Linear;
  if (name == "trilinear" || name == "tri-linear") return InterpKind::Trilinear;
  if (name == "quadratic") return InterpKind::Quadratic;
  throw ConfigError("unknown interpolation kind '" + std::string(name) + "'");
}

Eigen::VectorXd shape_functions(const Bary& b, InterpKind kind) {
  const double f1 = b.phi1, f2 = b.phi2, f3 = b.phi3;
  Eigen::VectorXd phi(shape_count(kind));
  switch (kind) {
    case InterpKind::Linear:
      phi << f1, f2, f3;
      break;
    case InterpKind::Trilinear: {
      const double bubble = f1 * f2 * f3;
      phi << f1 - 9.0 * bubble, f2 - 9.0 * bubble, f3 - 9.0 * bubble, 27.0 * bubble;
      break;
    }
    case InterpKind::Quadratic:
      phi << f1 * (2.0 * f1 - 1.0), f2 * (2.0 * f2 - 1.0), f3 * (2.0 * f3 - 1.0), 4.0 * f1 * f2,
          4.0 * f1 * f3, 4.0 * f2 * f3;
      break;
  }
  return phi;
}

OrientationFrame orientation_tensor_eig(const Mat3& a2) {
  if ((a2 - a2.transpose()).norm() > 1e-8 * std::max(1.0, a2.norm())) {
    throw PreconditionError("orientation tensor is not symmetric");
  }
  if (std::abs(a2.trace() - 1.0) > 1e-8) {
    throw PreconditionError("orientation tensor must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a2);
  // Eigen sorts ascending; reverse with a stable order for ties.
  std::array<int, 3> order{2, 1, 0};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eig.eigenvalues()[a] > eig.eigenvalues()[b];
  });
  OrientationFrame frame;
  for (int k = 0; k < 3; ++k) frame.rotation.col(k) = eig.eigenvectors().col(order[k]);
  if (frame.rotation.determinant() < 0.0) frame.rotation.col(2) *= -1.0;
  frame.point = {eig.eigenvalues()[order[0]], eig.eigenvalues()[order[1]]};
  return frame;
}

}  // namespace dmn

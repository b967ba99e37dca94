#include "dmn/laminate.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "dmn/error.hpp"

namespace dmn {

namespace {

constexpr double kMinRcond = 1e-13;

bool invert(const Stiffness& m, Stiffness& out) {
  Eigen::PartialPivLU<Stiffness> lu(m);
  if (!(lu.rcond() > kMinRcond)) return false;
  out = lu.inverse();
  return true;
}

double frobenius_dot(const Stiffness& a, const Stiffness& b) { return (a.array() * b.array()).sum(); }

void check_input(const LaminateInput& in) {
  if (!(in.frac_a >= 0.0 && in.frac_a <= 1.0)) {
    throw PreconditionError("laminate: volume fraction must lie in [0, 1]");
  }
  if (std::abs(in.n.norm() - 1.0) > 1e-12) {
    throw PreconditionError("laminate: direction of lamination must be a unit vector");
  }
}

}  // namespace

double default_alpha(const Stiffness& c_a, const Stiffness& c_b) {
  Eigen::SelfAdjointEigenSolver<Stiffness> ea(0.5 * (c_a + c_a.transpose()), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Stiffness> eb(0.5 * (c_b + c_b.transpose()), Eigen::EigenvaluesOnly);
  const double largest = std::max(ea.eigenvalues().maxCoeff(), eb.eigenvalues().maxCoeff());
  return 2.0 * largest;
}

namespace detail {

bool LaminateTape::forward(const Stiffness& c_a, const Stiffness& c_b, double frac_a, const Vec3& n,
                           double alpha) {
  alpha_ = alpha;
  frac_a_ = frac_a;
  n_ = n;
  proj_ = lamination_projector_raw(n);
  const Stiffness shift = alpha * Stiffness::Identity();
  if (!invert(c_a - shift, res_a_) || !invert(c_b - shift, res_b_)) return false;
  if (!invert(proj_ + alpha * res_a_, y_a_) || !invert(proj_ + alpha * res_b_, y_b_)) return false;
  if (!invert(frac_a * y_a_ + (1.0 - frac_a) * y_b_, s_)) return false;
  if (!invert(s_ - proj_, u_)) return false;
  if (frac_a == 1.0) {
    c_out_ = c_a;
  } else if (frac_a == 0.0) {
    c_out_ = c_b;
  } else {
    c_out_ = shift + alpha * u_;
  }
  return true;
}

void LaminateTape::backward(const Stiffness& d_cout, Stiffness& d_ca, Stiffness& d_cb, double& d_frac,
                            Vec3& d_n) const {
  // Reverse sweep of C = alpha I + alpha (Ybar^-1 - P)^-1; d(M^-1) = -M^-1 dM M^-1.
  const Stiffness g_u = alpha_ * d_cout;
  const Stiffness g_t = -u_.transpose() * g_u * u_.transpose();
  Stiffness g_p = -g_t;
  const Stiffness g_ybar = -s_.transpose() * g_t * s_.transpose();
  const Stiffness g_ya = frac_a_ * g_ybar;
  const Stiffness g_yb = (1.0 - frac_a_) * g_ybar;
  d_frac += frobenius_dot(g_ybar, y_a_) - frobenius_dot(g_ybar, y_b_);
  const Stiffness g_za = -y_a_.transpose() * g_ya * y_a_.transpose();
  const Stiffness g_zb = -y_b_.transpose() * g_yb * y_b_.transpose();
  g_p += g_za + g_zb;
  d_ca += -alpha_ * res_a_.transpose() * g_za * res_a_.transpose();
  d_cb += -alpha_ * res_b_.transpose() * g_zb * res_b_.transpose();
  const auto dp = lamination_projector_derivative(n_);
  for (int k = 0; k < 3; ++k) d_n[k] += frobenius_dot(g_p, dp[k]);
}

void run_laminate(LaminateTape& tape, const Stiffness& c_a, const Stiffness& c_b, double frac_a,
                  const Vec3& n, double alpha) {
  if (tape.forward(c_a, c_b, frac_a, n, alpha)) return;
  if (tape.forward(c_a, c_b, frac_a, n, 2.0 * alpha)) return;
  std::ostringstream msg;
  msg << "laminate: singular intermediate matrix for alpha = " << alpha << " and " << 2.0 * alpha;
  throw NumericError(msg.str());
}

}  // namespace detail

Stiffness laminate_stiffness(const LaminateInput& in, std::optional<double> alpha) {
  check_input(in);
  detail::LaminateTape tape;
  detail::run_laminate(tape, in.c_a, in.c_b, in.frac_a, in.n, alpha.value_or(default_alpha(in.c_a, in.c_b)));
  return tape.result();
}

LaminateGradients laminate_stiffness_adjoint(const LaminateInput& in, const Stiffness& d_cout,
                                             std::optional<double> alpha) {
  check_input(in);
  detail::LaminateTape tape;
  detail::run_laminate(tape, in.c_a, in.c_b, in.frac_a, in.n, alpha.value_or(default_alpha(in.c_a, in.c_b)));
  LaminateGradients g;
  tape.backward(d_cout, g.d_ca, g.d_cb, g.d_frac, g.d_n);
  return g;
}

}  // namespace dmn

#pragma once

#include <optional>

#include "dmn/mech.hpp"

namespace dmn {

/// Two-phase rank-one laminate: phase a with volume fraction frac_a, phase b
/// with 1 - frac_a, layered normal to n.
struct LaminateInput {
  Stiffness c_a;
  Stiffness c_b;
  double frac_a = 0.5;
  Vec3 n = Vec3::UnitX();
};

struct LaminateGradients {
  Stiffness d_ca = Stiffness::Zero();
  Stiffness d_cb = Stiffness::Zero();
  double d_frac = 0.0;
  Vec3 d_n = Vec3::Zero();
};

/// Twice the largest eigenvalue of the two phase stiffnesses.
double default_alpha(const Stiffness& c_a, const Stiffness& c_b);

/// Effective stiffness of the laminate. The reference parameter alpha must
/// keep C - alpha I invertible for both phases; an ill-conditioned shift is
/// retried once with 2 alpha before a NumericError is raised.
Stiffness laminate_stiffness(const LaminateInput& in, std::optional<double> alpha = std::nullopt);

/// Reverse-mode derivative of a scalar loss L through laminate_stiffness,
/// given dL/dC_out. Gradients are taken w.r.t. all 36 stiffness entries.
LaminateGradients laminate_stiffness_adjoint(const LaminateInput& in, const Stiffness& d_cout,
                                             std::optional<double> alpha = std::nullopt);

namespace detail {

/// Forward evaluation that keeps the intermediates needed for the adjoint.
class LaminateTape {
 public:
  /// Direction n is used as given (no unit check). Returns false if an
  /// intermediate matrix was numerically singular at this alpha.
  bool forward(const Stiffness& c_a, const Stiffness& c_b, double frac_a, const Vec3& n,
               double alpha);
  const Stiffness& result() const { return c_out_; }
  double alpha() const { return alpha_; }
  /// Accumulates (+=) gradients for the given output sensitivity.
  void backward(const Stiffness& d_cout, Stiffness& d_ca, Stiffness& d_cb, double& d_frac,
                Vec3& d_n) const;

 private:
  double alpha_ = 0.0;
  double frac_a_ = 0.0;
  Vec3 n_;
  Stiffness proj_;
  Stiffness res_a_, res_b_;  // (C - alpha I)^-1
  Stiffness y_a_, y_b_;      // (P + alpha res)^-1
  Stiffness s_;              // (frac_a y_a + frac_b y_b)^-1
  Stiffness u_;              // (s - P)^-1
  Stiffness c_out_;
};

/// Forward pass with the singularity retry policy; throws NumericError.
void run_laminate(LaminateTape& tape, const Stiffness& c_a, const Stiffness& c_b, double frac_a,
                  const Vec3& n, double alpha);

}  // namespace detail

}  // namespace dmn

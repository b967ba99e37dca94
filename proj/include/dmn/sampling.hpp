#pragma once

// Training inputs: quasi-random phase stiffness pairs and discrete points of
// the orientation triangle.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmn/mech.hpp"

namespace dmn {

/// 8-dimensional Sobol points in [0,1)^8. A nonzero seed applies a random
/// digital shift (XOR of every coordinate with a seed-derived word), which
/// keeps the low-discrepancy structure.
class SobolSequence {
 public:
  SobolSequence(int dimension, std::uint64_t seed);
  std::vector<double> next();
  int dimension() const { return dimension_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  int dimension_;
};

/// Unit-cube coordinates in the order (a, e1, e2, e3, beta, theta, psi, phi).
struct SampleParameters {
  double a = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  double phi = 0.0;

  static SampleParameters from_unit_cube(const std::vector<double>& u);
};

inline constexpr double kReferenceBulk = 1000.0;  // K1 = 1 GPa in MPa

struct StiffnessSample {
  // Stored parameters: K1, G1, K2, G2 [MPa], a, beta, theta, psi, phi.
  std::array<double, 9> params{};
  Stiffness c1 = Stiffness::Zero();
  Stiffness c2 = Stiffness::Zero();
  OrientationPoint point;
  std::optional<Stiffness> label;
};

/// Trace-free diagonal tensor of unit Frobenius norm parameterised by one angle.
Mat3 deviatoric_direction(double beta);

/// C1 isotropic, C2 isotropic minus a rank-one deviatoric perturbation.
StiffnessSample make_sample(const SampleParameters& params);

struct TriangleDiscretization {
  std::string name;
  std::vector<OrientationPoint> points;
};

/// "d4", "d10" or "d31": nodes of the hierarchically subdivided triangle plus
/// the centroids of the sub-triangles.
TriangleDiscretization triangle_discretization(const std::string& name);
/// Subdivision level 0, 1, 2 gives 4, 10, 31 points.
TriangleDiscretization triangle_discretization(int level);

/// Samples the pairs from the Sobol sequence and assigns the orientations of
/// the discretization in cyclic order.
std::vector<StiffnessSample> sample_stiffness_pairs(int count, std::uint64_t seed,
                                                    const TriangleDiscretization& disc);

/// Default dataset size (desk presets divide by 4).
int default_sample_count(const std::string& discretization, bool desk);

}  // namespace dmn

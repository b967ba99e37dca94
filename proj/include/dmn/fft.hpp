#pragma once

// Linear-elastic homogenization on periodic voxel grids. The strain
// fluctuation solves the projected equilibrium equation P C (E + e) = 0 by
// conjugate gradients, where P projects onto compatible fields of the rotated
// staggered-grid (Willot) discretization.

#include <array>
#include <memory>
#include <string>

#include "dmn/mech.hpp"
#include "dmn/microstructure.hpp"

namespace dmn {

struct FftSolveConfig {
  double tolerance = 1e-8;  // relative residual of the projected equilibrium equation
  int max_iterations = 20000;
  std::string scheme = "rotated-staggered";
  std::string reference = "none (projected conjugate gradients)";
};

struct FftResult {
  Stiffness stiffness = Stiffness::Zero();  // symmetrised
  double asymmetry = 0.0;                    // ||C - C^T|| / ||C|| before symmetrisation
  std::array<int, 6> iterations{};
  std::array<double, 6> residuals{};
};

/// Reusable solver for one grid size; FFT plans are created once.
class FftHomogenizer {
 public:
  explicit FftHomogenizer(std::array<int, 3> dims);
  ~FftHomogenizer();
  FftHomogenizer(const FftHomogenizer&) = delete;
  FftHomogenizer& operator=(const FftHomogenizer&) = delete;

  /// Phase 0 takes c_matrix, phase 1 c_fiber.
  FftResult solve(const VoxelMicrostructure& ms, const Stiffness& c_matrix, const Stiffness& c_fiber,
                  const FftSolveConfig& config = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FftResult effective_stiffness_fft(const VoxelMicrostructure& ms, const Stiffness& c_matrix, const Stiffness& c_fiber,
                                  const FftSolveConfig& config = {});

/// Hashin-Shtrikman bounds on the bulk modulus of two isotropic phases.
std::pair<double, double> hashin_shtrikman_bulk(double k1, double g1, double k2, double g2, double c1);

}  // namespace dmn

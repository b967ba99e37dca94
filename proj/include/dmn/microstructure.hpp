#pragma once

// Simplified short-fiber microstructures: spherocylinders with directions
// drawn from an angular central Gaussian distribution, placed by random
// sequential addition on a periodic voxel grid.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dmn/mech.hpp"

namespace dmn {

struct VoxelMicrostructure {
  std::array<int, 3> dims{0, 0, 0};   // index (i, j, k) -> (i * n2 + j) * n3 + k
  std::vector<std::uint8_t> phase;     // 0 matrix, 1 fiber
  double voxel_size = 1.0;             // [um]
  double fiber_length = 0.0;           // [voxels]
  double fiber_diameter = 0.0;         // [voxels]
  double target_fraction = 0.0;
  OrientationPoint target;
  double fiber_fraction = 0.0;         // realized voxel fraction
  Mat3 orientation_tensor = Mat3::Zero();  // realized A2 of the placed fibers
  int fiber_count = 0;
  std::uint64_t seed = 0;

  std::size_t voxel_count() const { return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]; }
  /// Recounts the fiber voxels.
  double measured_fraction() const;
  /// Realized (lambda1, lambda2) of the placed fibers.
  OrientationPoint realized_point() const;
};

struct GeneratorConfig {
  double fiber_length = 10.0;    // [voxels], tip to tip
  double fiber_diameter = 2.0;   // [voxels]
  double fiber_fraction = 0.16;
  std::array<int, 3> grid{32, 32, 32};
  double voxel_size = 1.0;
  int max_attempts_per_fiber = 20000;
};

/// Scale matrix of an angular central Gaussian distribution whose second
/// moment is diag(l1, l2, l3).
Eigen::Vector3d acg_scales(const OrientationPoint& target);
/// Second moment diag(E[x_i^2]) of the angular central Gaussian with diagonal scales.
Eigen::Vector3d acg_second_moment(const Eigen::Vector3d& scales);

/// Unit fiber directions whose empirical second moment is corrected towards
/// diag(l1, l2, l3).
std::vector<Vec3> sample_fiber_directions(const OrientationPoint& target, int count, std::uint64_t seed);

/// Orientation states with lambda3 < 0.01 are accepted only close to the
/// unidirectional corner (lambda2 <= 0.01).
VoxelMicrostructure generate_microstructure(const OrientationPoint& target, const GeneratorConfig& config,
                                            std::uint64_t seed);

/// Raw phase bytes plus a JSON sidecar (`path` + ".json").
void save_microstructure(const VoxelMicrostructure& ms, const std::string& path);
VoxelMicrostructure load_microstructure(const std::string& path);

/// Two-phase layered grid: the first `split` voxels along `axis` are phase 1.
VoxelMicrostructure layered_microstructure(std::array<int, 3> dims, int axis, int split);

}  // namespace dmn

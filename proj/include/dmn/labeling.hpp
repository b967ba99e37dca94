#pragma once

// FFT labels for stiffness samples: one generated microstructure per point of
// the orientation discretization, reused for every sample assigned to it.

#include <cstdint>
#include <string>
#include <vector>

#include "dmn/fft.hpp"
#include "dmn/microstructure.hpp"
#include "dmn/sampling.hpp"

namespace dmn {

struct LabelConfig {
  GeneratorConfig generator;
  FftSolveConfig fft;
  int threads = 1;
  std::uint64_t seed = 0;
  /// Orientation states with a smaller third eigenvalue are generated at the
  /// nearest state with this third eigenvalue (planar-isotropic corner).
  double min_lambda3 = 0.01;
};

struct LabelReport {
  std::vector<VoxelMicrostructure> microstructures;  // one per discretization point
  std::vector<OrientationPoint> generated_targets;
  std::vector<int> dropped;                          // indices into the input sample list
  std::vector<std::string> messages;
  int max_iterations = 0;
  double max_asymmetry = 0.0;
};

/// Target used for the generator at orientation p.
OrientationPoint generator_target(const OrientationPoint& p, double min_lambda3);

/// Labels samples in place; samples whose solve fails are removed and listed
/// in the report. Results do not depend on the thread count.
LabelReport build_training_labels(const TriangleDiscretization& disc, std::vector<StiffnessSample>& samples,
                                  const LabelConfig& config);

}  // namespace dmn

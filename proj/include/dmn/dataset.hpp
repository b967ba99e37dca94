#pragma once

// Binary container for (labeled) stiffness samples.
//
// Layout (little endian):
//   char[8]  magic "DMNDSET\0"
//   u32      format version
//   u32      flags (bit 0: records carry labels)
//   u64      record count
//   u64      sampling seed
//   u32 + n  discretization name
//   u32 + n  provenance JSON
//   records: 9 parameters, C1, C2, label (3 x 36 Mandel entries, row major),
//            lambda1, lambda2 -- all f64. Unlabeled records store zeros.

#include <cstdint>
#include <string>
#include <vector>

#include "dmn/sampling.hpp"

namespace dmn {

inline constexpr std::uint32_t kDatasetFormatVersion = 1;

struct Dataset {
  std::uint64_t seed = 0;
  std::string discretization;
  std::string provenance = "{}";
  std::vector<StiffnessSample> samples;

  bool labeled() const;
};

std::string encode_dataset(const Dataset& d);
Dataset decode_dataset(const std::string& bytes);

void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

/// One row per sample: parameters, orientation, then the 36 entries of C1, C2
/// and the label in Voigt components.
std::string dataset_to_csv(const Dataset& d);

/// Whole-file helpers shared by the tools.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dmn

#include "dmn/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "dmn/dataset.hpp"
#include "dmn/error.hpp"

namespace dmn {

double VoxelMicrostructure::measured_fraction() const {
  if (phase.empty()) return 0.0;
  const auto fibers = std::count(phase.begin(), phase.end(), std::uint8_t{1});
  return static_cast<double>(fibers) / static_cast<double>(phase.size());
}

OrientationPoint VoxelMicrostructure::realized_point() const {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(orientation_tensor, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d l = eig.eigenvalues();  // ascending
  return {l[2], l[1]};
}

// ---------------------------------------------------------------------------

Eigen::Vector3d acg_second_moment(const Eigen::Vector3d& s) {
  // E[z_i^2 / |z|^2] for z ~ N(0, diag(s)), via 1/|z|^2 = int_0^inf exp(-t |z|^2) dt
  // and the substitution t = exp(y).
  const int n = 8000;
  const double y0 = -40.0, y1 = 40.0, h = (y1 - y0) / n;
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (int k = 0; k <= n; ++k) {
    const double t = std::exp(y0 + k * h);
    double common = t;
    for (int j = 0; j < 3; ++j) common /= std::sqrt(1.0 + 2.0 * s[j] * t);
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    for (int i = 0; i < 3; ++i) m[i] += w * common * s[i] / (1.0 + 2.0 * s[i] * t);
  }
  return m * h / 3.0;
}

Eigen::Vector3d acg_scales(const OrientationPoint& target) {
  const Eigen::Vector3d lambda(target.l1, target.l2, target.l3());
  Eigen::Vector3d s = lambda;
  for (int it = 0; it < 500; ++it) {
    const Eigen::Vector3d m = acg_second_moment(s);
    double change = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (lambda[i] <= 0.0) {
        s[i] = 0.0;
        continue;
      }
      const double factor = lambda[i] / m[i];
      change = std::max(change, std::abs(factor - 1.0));
      s[i] *= factor;
    }
    s /= s.sum();
    if (change < 1e-10) break;
  }
  return s;
}

namespace {

Mat3 sym_power(const Mat3& a, double power) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
  Eigen::Vector3d d = eig.eigenvalues();
  for (int i = 0; i < 3; ++i) d[i] = d[i] > 1e-14 ? std::pow(d[i], power) : 0.0;
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

Mat3 second_moment(const std::vector<Vec3>& dirs) {
  Mat3 a = Mat3::Zero();
  for (const Vec3& x : dirs) a += x * x.transpose();
  return a / static_cast<double>(dirs.size());
}

}  // namespace

std::vector<Vec3> sample_fiber_directions(const OrientationPoint& target, int count, std::uint64_t seed) {
  const Eigen::Vector3d s = acg_scales(target);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&]() {
    for (;;) {
      Vec3 z(std::sqrt(s[0]) * normal(rng), std::sqrt(s[1]) * normal(rng), std::sqrt(s[2]) * normal(rng));
      const double len = z.norm();
      if (len > 1e-12) return Vec3(z / len);
    }
  };
  std::vector<Vec3> dirs(count);
  for (auto& d : dirs) d = draw();
  const Mat3 target_root = sym_power(Eigen::Vector3d(target.l1, target.l2, target.l3()).asDiagonal(), 0.5);
  for (int it = 0; it < 20; ++it) {
    const Mat3 map = target_root * sym_power(second_moment(dirs), -0.5);
    for (auto& d : dirs) {
      Vec3 y = map * d;
      d = y.norm() > 1e-12 ? Vec3(y / y.norm()) : draw();
    }
  }
  return dirs;
}

// ---------------------------------------------------------------------------

namespace {

struct Placement {
  VoxelMicrostructure ms;
  bool complete = false;
};

int wrap(int i, int n) { return ((i % n) + n) % n; }

/// Voxels whose centers lie within radius of the segment c +- (half) d.
void fiber_voxels(const VoxelMicrostructure& ms, const Vec3& center, const Vec3& dir, double half, double radius,
                  std::vector<std::size_t>& out) {
  out.clear();
  const Vec3 a = center - half * dir, b = center + half * dir;
  std::array<int, 3> lo, hi;
  for (int d = 0; d < 3; ++d) {
    lo[d] = static_cast<int>(std::floor(std::min(a[d], b[d]) - radius - 1.0));
    hi[d] = static_cast<int>(std::ceil(std::max(a[d], b[d]) + radius + 1.0));
  }
  const double r2 = radius * radius;
  for (int i = lo[0]; i <= hi[0]; ++i) {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      for (int k = lo[2]; k <= hi[2]; ++k) {
        const Vec3 p(i + 0.5, j + 0.5, k + 0.5);
        const double t = std::clamp((p - a).dot(b - a) / std::max((b - a).squaredNorm(), 1e-300), 0.0, 1.0);
        if ((p - (a + t * (b - a))).squaredNorm() > r2) continue;
        out.push_back((static_cast<std::size_t>(wrap(i, ms.dims[0])) * ms.dims[1] + wrap(j, ms.dims[1])) *
                          ms.dims[2] +
                      wrap(k, ms.dims[2]));
      }
    }
  }
}

Placement place_fibers(const OrientationPoint& target, const GeneratorConfig& cfg, std::uint64_t seed) {
  Placement pl;
  VoxelMicrostructure& ms = pl.ms;
  ms.dims = cfg.grid;
  ms.phase.assign(ms.voxel_count(), 0);
  ms.voxel_size = cfg.voxel_size;
  ms.fiber_length = cfg.fiber_length;
  ms.fiber_diameter = cfg.fiber_diameter;
  ms.target_fraction = cfg.fiber_fraction;
  ms.target = target;
  ms.seed = seed;

  const double radius = 0.5 * cfg.fiber_diameter;
  const double half = 0.5 * std::max(cfg.fiber_length - cfg.fiber_diameter, 0.0);
  const double fiber_volume = kPi * radius * radius * 2.0 * half + 4.0 / 3.0 * kPi * radius * radius * radius;
  const int expected = static_cast<int>(std::ceil(cfg.fiber_fraction * ms.voxel_count() / fiber_volume));
  std::vector<Vec3> pool = sample_fiber_directions(target, std::max(2 * expected + 16, 64), seed);
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5deadbeefULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t goal = static_cast<std::size_t>(std::ceil(cfg.fiber_fraction * ms.voxel_count()));
  std::size_t filled = 0;
  std::size_t next_dir = 0;
  std::vector<std::size_t> voxels;
  Mat3 moment = Mat3::Zero();
  while (filled < goal) {
    if (next_dir == pool.size()) {
      auto more = sample_fiber_directions(target, static_cast<int>(pool.size()), seed + pool.size());
      pool.insert(pool.end(), more.begin(), more.end());
    }
    const Vec3 dir = pool[next_dir++];
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts_per_fiber && !placed; ++attempt) {
      const Vec3 center(unit(rng) * ms.dims[0], unit(rng) * ms.dims[1], unit(rng) * ms.dims[2]);
      fiber_voxels(ms, center, dir, half, radius, voxels);
      if (voxels.empty()) continue;
      std::sort(voxels.begin(), voxels.end());
      voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
      bool free = true;
      for (std::size_t v : voxels) {
        if (ms.phase[v]) {
          free = false;
          break;
        }
      }
      if (!free) continue;
      for (std::size_t v : voxels) ms.phase[v] = 1;
      filled += voxels.size();
      moment += dir * dir.transpose();
      ++ms.fiber_count;
      placed = true;
    }
    if (!placed) return pl;
  }
  ms.fiber_fraction = ms.measured_fraction();
  ms.orientation_tensor = moment / std::max(ms.fiber_count, 1);
  pl.complete = true;
  return pl;
}

}  // namespace

VoxelMicrostructure generate_microstructure(const OrientationPoint& target_in, const GeneratorConfig& cfg,
                                            std::uint64_t seed) {
  const OrientationPoint target = checked_orientation(target_in);
  if (target.l3() < 0.01 && target.l2 > 0.01) {
    throw PreconditionError("generator: orientation states need lambda3 >= 0.01 away from the unidirectional corner");
  }
  if (!(cfg.fiber_fraction > 0.0 && cfg.fiber_fraction <= 0.35)) {
    throw PreconditionError("generator: fiber volume fraction must lie in (0, 0.35]");
  }
  const int min_dim = std::min({cfg.grid[0], cfg.grid[1], cfg.grid[2]});
  if (!(cfg.fiber_diameter > 0.0 && cfg.fiber_length >= cfg.fiber_diameter && cfg.fiber_length + cfg.fiber_diameter < min_dim)) {
    throw PreconditionError("generator: need 0 < diameter <= length and length + diameter below the grid size");
  }
  constexpr int kTries = 6;
  Placement best;
  double best_dev = std::numeric_limits<double>::infinity();
  for (int t = 0; t < kTries; ++t) {
    Placement pl = place_fibers(target, cfg, seed + 7919ULL * t);
    if (!pl.complete) continue;
    const OrientationPoint r = pl.ms.realized_point();
    const double dev = std::max(std::abs(r.l1 - target.l1), std::abs(r.l2 - target.l2));
    if (dev < best_dev) {
      best_dev = dev;
      best = std::move(pl);
    }
    if (dev <= 0.02) break;
  }
  if (!best.complete) {
    throw NumericError("generator: fiber placement failed after " + std::to_string(cfg.max_attempts_per_fiber) +
                       " attempts per fiber; lower the fiber fraction or allow more attempts");
  }
  best.ms.seed = seed;
  return best.ms;
}

VoxelMicrostructure layered_microstructure(std::array<int, 3> dims, int axis, int split) {
  VoxelMicrostructure ms;
  ms.dims = dims;
  ms.phase.assign(ms.voxel_count(), 0);
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        const int coord = axis == 0 ? i : (axis == 1 ? j : k);
        if (coord < split) ms.phase[(static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k] = 1;
      }
    }
  }
  ms.fiber_fraction = ms.measured_fraction();
  ms.target_fraction = ms.fiber_fraction;
  return ms;
}

// ---------------------------------------------------------------------------

void save_microstructure(const VoxelMicrostructure& ms, const std::string& path) {
  nlohmann::ordered_json j;
  j["dims"] = ms.dims;
  j["voxel_size_um"] = ms.voxel_size;
  j["fiber_length_voxels"] = ms.fiber_length;
  j["fiber_diameter_voxels"] = ms.fiber_diameter;
  j["target_fraction"] = ms.target_fraction;
  j["target_lambda"] = {ms.target.l1, ms.target.l2};
  j["fiber_fraction"] = ms.fiber_fraction;
  j["fiber_count"] = ms.fiber_count;
  const OrientationPoint r = ms.realized_point();
  j["realized_lambda"] = {r.l1, r.l2};
  nlohmann::ordered_json a2 = nlohmann::ordered_json::array();
  for (int r2 = 0; r2 < 3; ++r2) a2.push_back({ms.orientation_tensor(r2, 0), ms.orientation_tensor(r2, 1), ms.orientation_tensor(r2, 2)});
  j["orientation_tensor"] = a2;
  j["seed"] = ms.seed;
  j["layout"] = "uint8 phase per voxel, index (i * n2 + j) * n3 + k, 0 matrix, 1 fiber";
  write_file(path, std::string(ms.phase.begin(), ms.phase.end()));
  write_file(path + ".json", j.dump(2) + "\n");
}

VoxelMicrostructure load_microstructure(const std::string& path) {
  VoxelMicrostructure ms;
  try {
    const auto j = nlohmann::json::parse(read_file(path + ".json"));
    ms.dims = j.at("dims").get<std::array<int, 3>>();
    ms.voxel_size = j.at("voxel_size_um").get<double>();
    ms.fiber_length = j.at("fiber_length_voxels").get<double>();
    ms.fiber_diameter = j.at("fiber_diameter_voxels").get<double>();
    ms.target_fraction = j.at("target_fraction").get<double>();
    ms.target = {j.at("target_lambda")[0].get<double>(), j.at("target_lambda")[1].get<double>()};
    ms.fiber_fraction = j.at("fiber_fraction").get<double>();
    ms.fiber_count = j.at("fiber_count").get<int>();
    const auto& a2 = j.at("orientation_tensor");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ms.orientation_tensor(r, c) = a2.at(r).at(c).get<double>();
    }
    ms.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("microstructure sidecar '" + path + ".json': " + e.what());
  }
  const std::string raw = read_file(path);
  if (raw.size() != ms.voxel_count()) throw IoError("microstructure '" + path + "': size does not match dims");
  ms.phase.assign(raw.begin(), raw.end());
  for (auto p : ms.phase) {
    if (p > 1) throw IoError("microstructure '" + path + "': phase index out of range");
  }
  return ms;
}

}  // namespace dmn

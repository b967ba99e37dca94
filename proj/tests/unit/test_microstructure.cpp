#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "dmn/error.hpp"
#include "dmn/microstructure.hpp"

using namespace dmn;

TEST_CASE("angular central Gaussian scales reproduce the second moment") {
  const OrientationPoint pts[] = {{0.5, 0.3}, {0.8, 0.15}, {1.0 / 3.0, 1.0 / 3.0}, {0.45, 0.45}};
  for (const auto& p : pts) {
    const Eigen::Vector3d m = acg_second_moment(acg_scales(p));
    CHECK(m(0) == doctest::Approx(p.l1).epsilon(1e-8));
    CHECK(m(1) == doctest::Approx(p.l2).epsilon(1e-8));
    CHECK(m.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("sampled directions match the target orientation") {
  const OrientationPoint p{0.6, 0.3};
  const auto dirs = sample_fiber_directions(p, 200, 3);
  REQUIRE(dirs.size() == 200);
  Mat3 a = Mat3::Zero();
  for (const auto& d : dirs) {
    CHECK(d.norm() == doctest::Approx(1.0));
    a += d * d.transpose() / 200.0;
  }
  CHECK(a(0, 0) == doctest::Approx(0.6).epsilon(0.02));
  CHECK(a(1, 1) == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("generated microstructure") {
  GeneratorConfig g;
  g.grid = {32, 32, 32};
  g.fiber_fraction = 0.16;
  const OrientationPoint target{0.6, 0.3};
  const VoxelMicrostructure ms = generate_microstructure(target, g, 7);
  CHECK(ms.fiber_count > 0);
  CHECK(ms.measured_fraction() == doctest::Approx(ms.fiber_fraction));
  CHECK(std::abs(ms.fiber_fraction - 0.16) < 0.05);
  const OrientationPoint r = ms.realized_point();
  CHECK(std::abs(r.l1 - target.l1) < 0.05);
  CHECK(std::abs(r.l2 - target.l2) < 0.05);

  const VoxelMicrostructure again = generate_microstructure(target, g, 7);
  CHECK(again.phase == ms.phase);

  const std::string path = (std::filesystem::temp_directory_path() / "dmn_unit_ms.raw").string();
  save_microstructure(ms, path);
  const VoxelMicrostructure back = load_microstructure(path);
  CHECK(back.phase == ms.phase);
  CHECK(back.dims == ms.dims);
  CHECK(back.seed == 7);
  CHECK(back.fiber_fraction == doctest::Approx(ms.fiber_fraction));
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
  CHECK_THROWS_AS(load_microstructure(path), IoError);
}

TEST_CASE("generator preconditions") {
  GeneratorConfig g;
  g.grid = {16, 16, 16};
  g.fiber_fraction = 0.4;
  CHECK_THROWS_AS(generate_microstructure({0.5, 0.3}, g, 1), PreconditionError);
  g.fiber_fraction = 0.1;
  CHECK_THROWS_AS(generate_microstructure({0.5, 0.5}, g, 1), PreconditionError);
  g.fiber_length = 20.0;
  CHECK_THROWS_AS(generate_microstructure({0.5, 0.3}, g, 1), PreconditionError);
}

#include <set>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dmn/error.hpp"
#include "dmn/sampling.hpp"

using namespace dmn;

TEST_CASE("triangle discretizations") {
  CHECK(triangle_discretization("d4").points.size() == 4);
  CHECK(triangle_discretization("d10").points.size() == 10);
  CHECK(triangle_discretization("d31").points.size() == 31);
  const auto d4 = triangle_discretization("d4");
  CHECK(d4.points[0].l1 == doctest::Approx(1.0));
  CHECK(d4.points[1].l1 == doctest::Approx(1.0 / 3.0));
  CHECK(d4.points[2].l2 == doctest::Approx(0.5));
  for (const auto& p : triangle_discretization("d31").points) CHECK(triangle_violation(p) < 1e-12);
  CHECK_THROWS_AS(triangle_discretization("d7"), ConfigError);
  CHECK(default_sample_count("d4", false) == 800);
  CHECK(default_sample_count("d4", true) == 200);
}

TEST_CASE("sobol sequence is deterministic and shifts with the seed") {
  SobolSequence a(8, 0), b(8, 0), c(8, 42);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x[0] == doctest::Approx(0.5));
  const auto y = c.next();
  CHECK(y != x);
  for (double v : y) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("stiffness samples") {
  const auto disc = triangle_discretization("d4");
  const auto s = sample_stiffness_pairs(12, 3, disc);
  REQUIRE(s.size() == 12);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(s[k].point.l1 == disc.points[k % 4].l1);
    CHECK(s[k].params[0] == kReferenceBulk);
    CHECK(is_positive_definite(s[k].c1));
    CHECK(is_symmetric(s[k].c2));
    CHECK_FALSE(s[k].label.has_value());
  }
  const auto again = sample_stiffness_pairs(12, 3, disc);
  CHECK((again[7].c2 - s[7].c2).norm() == 0.0);
}

TEST_CASE("deviatoric direction is trace free with unit norm") {
  for (double beta : {0.0, 0.3, 1.7, 4.0}) {
    const Mat3 n = deviatoric_direction(beta);
    CHECK(std::abs(n.trace()) < 1e-14);
    CHECK(n.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("rank-one softening keeps C2 positive definite below a = 1") {
  SampleParameters p = SampleParameters::from_unit_cube({0.999, 0.5, 0.5, 0.5, 0.2, 0.3, 0.4, 0.5});
  const StiffnessSample s = make_sample(p);
  CHECK(is_positive_definite(s.c2));
  CHECK_THROWS(SampleParameters::from_unit_cube({0.1, 0.2}));
}

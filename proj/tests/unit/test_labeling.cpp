#include "doctest.h"
#include "dmn/error.hpp"
#include "dmn/labeling.hpp"

using namespace dmn;

TEST_CASE("generator target near the planar corner") {
  const OrientationPoint t = generator_target({0.5, 0.5}, 0.01);
  CHECK(t.l1 == doctest::Approx(0.495));
  CHECK(t.l2 == doctest::Approx(0.495));
  const OrientationPoint u = generator_target({1.0, 0.0}, 0.01);
  CHECK(u.l1 == 1.0);
  CHECK(u.l2 == 0.0);
  const OrientationPoint i = generator_target({0.5, 0.3}, 0.01);
  CHECK(i.l1 == 0.5);
}

TEST_CASE("labels do not depend on the thread count") {
  const TriangleDiscretization disc = triangle_discretization("d4");
  LabelConfig cfg;
  cfg.generator.grid = {12, 12, 12};
  cfg.generator.fiber_length = 5.0;
  cfg.generator.fiber_diameter = 2.0;
  cfg.generator.fiber_fraction = 0.12;
  cfg.seed = 3;
  std::vector<StiffnessSample> a = sample_stiffness_pairs(6, 2, disc), b = a;
  const LabelReport ra = build_training_labels(disc, a, cfg);
  cfg.threads = 3;
  const LabelReport rb = build_training_labels(disc, b, cfg);
  CHECK(ra.dropped.empty());
  CHECK(ra.microstructures.size() == 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    REQUIRE(a[s].label);
    REQUIRE(b[s].label);
    CHECK((*a[s].label - *b[s].label).norm() == 0.0);
    CHECK(is_positive_definite(*a[s].label));
  }
  CHECK(ra.generated_targets[3].l1 == rb.generated_targets[3].l1);
}

TEST_CASE("labeling preconditions") {
  const TriangleDiscretization disc = triangle_discretization("d4");
  std::vector<StiffnessSample> s = sample_stiffness_pairs(2, 2, disc);
  LabelConfig cfg;
  cfg.threads = 0;
  CHECK_THROWS_AS(build_training_labels(disc, s, cfg), ConfigError);
  cfg.threads = 1;
  s[0].point = {0.7, 0.1};
  CHECK_THROWS_AS(build_training_labels(disc, s, cfg), PreconditionError);
}

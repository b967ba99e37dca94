#include "doctest.h"
#include "dmn/dataset.hpp"
#include "dmn/error.hpp"

using namespace dmn;

TEST_CASE("dataset encoding round trip") {
  Dataset d;
  d.seed = 9;
  d.discretization = "d4";
  d.provenance = "{\"a\":1}";
  d.samples = sample_stiffness_pairs(6, 9, triangle_discretization("d4"));
  CHECK_FALSE(d.labeled());
  const Dataset back = decode_dataset(encode_dataset(d));
  CHECK(back.seed == 9);
  CHECK(back.provenance == d.provenance);
  REQUIRE(back.samples.size() == 6);
  CHECK((back.samples[5].c2 - d.samples[5].c2).norm() == 0.0);
  CHECK(back.samples[5].params == d.samples[5].params);

  for (auto& s : d.samples) s.label = s.c1;
  const Dataset lab = decode_dataset(encode_dataset(d));
  CHECK(lab.labeled());
  CHECK((*lab.samples[2].label - d.samples[2].c1).norm() == 0.0);
}

TEST_CASE("corrupt datasets are rejected") {
  Dataset d;
  d.discretization = "d4";
  d.samples = sample_stiffness_pairs(2, 1, triangle_discretization("d4"));
  std::string bytes = encode_dataset(d);
  CHECK_THROWS_AS(decode_dataset(bytes.substr(0, bytes.size() - 8)), IoError);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_dataset(bad), IoError);
  CHECK_THROWS_AS(decode_dataset(bytes + "extra"), IoError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.bin"), IoError);
}

TEST_CASE("dataset CSV export") {
  Dataset d;
  d.discretization = "d4";
  d.samples = sample_stiffness_pairs(3, 1, triangle_discretization("d4"));
  const std::string csv = dataset_to_csv(d);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 4);
}

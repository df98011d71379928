#include <string>

#include "doctest.h"
#include "gprbtd/config.hpp"
#include "gprbtd/core.hpp"

using namespace gprbtd;

TEST_CASE("defaults carry the published parameter values") {
  PipelineConfig c;
  CHECK(c.halo_m == 0.25);
  CHECK(c.ehd_depths == 14);
  CHECK(c.ehd_depth_stride == 25);
  CHECK(c.ehd_negatives_per_alarm == 5);
  CHECK(c.ehd_top_k == 3);
  CHECK(c.lg_subsample == 0.05);
  CHECK(c.lg_top_rows == 4);
  CHECK(c.lg_top_k == 3);
  CHECK(c.hog_downsample == 2);
  CHECK(c.hog_size == 18);
  CHECK(c.hog_trees == 100);
  CHECK(c.hog_top_k == 12);
  CHECK(c.hog_positive_patches == 4);
  CHECK(c.hog_negative_patches == 24);
  CHECK(c.sed_svm_gamma == 0.001);
  CHECK(c.sed_svm_c == 15.0);
  CHECK(c.sed_edge_threshold == 3.0);
  CHECK(c.sed_scans == 50);
  CHECK(c.sed_above == 5);
  CHECK(c.sed_top_k == 25);
  CHECK(c.sed_train_maxima == 2);
  CHECK(c.ccy_max_arm == 5);
  CHECK(c.ccy_window == 9);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("documents parse with comments and overrides") {
  auto c = parse_config("# comment\nhalo_m = 0.3\n\nseed = 99  # trailing\nfit_rescale = false\n");
  CHECK(c.halo_m == 0.3);
  CHECK(c.seed == 99);
  CHECK_FALSE(c.fit_rescale);
}

TEST_CASE("unknown keys and bad values name the key") {
  try {
    parse_config("bogus_key = 1\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
  try {
    parse_config("halo_m = -1\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("halo_m") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("halo_m = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("halo_m\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("ccy_window = 8\n"), ConfigError);
}

TEST_CASE("dump lists every key and parses back to the same config") {
  PipelineConfig c;
  c.halo_m = 0.3125;
  c.seed = 123456789012345ULL;
  c.lg_subsample = 1.0;
  const std::string d = dump_config(c);
  for (const auto& k : config_keys()) CHECK(d.find(k + " = ") != std::string::npos);
  auto back = parse_config(d);
  CHECK(dump_config(back) == d);
  CHECK(config_hash(back) == config_hash(c));
  PipelineConfig other = c;
  other.sed_top_k = 24;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("single overrides") {
  PipelineConfig c;
  set_config_value(c, "sed_top_k", "10");
  CHECK(c.sed_top_k == 10);
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
}

TEST_CASE("hash helpers") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

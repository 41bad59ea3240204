#include <gtest/gtest.h>

#include <fstream>

#include "diskadapt/config.hpp"
#include "diskadapt/suites.hpp"
#include "test_util.hpp"

using namespace diskadapt;
using namespace diskadapt::testing;

namespace {

std::string error_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsMatchTheDocumentedValues) {
  const RunConfig c = parse_config("{}");
  EXPECT_DOUBLE_EQ(c.sim.io.peak_io_cap, 0.05);
  EXPECT_DOUBLE_EQ(c.sim.io.avg_io, 0.01);
  EXPECT_DOUBLE_EQ(c.sim.transition.threshold_fraction, 0.75);
  EXPECT_EQ(c.sim.transition.canary_count, 3000);
  EXPECT_EQ(c.sim.reliability.scheme0, (Scheme{6, 9}));
  EXPECT_DOUBLE_EQ(c.sim.reliability.afr0, 16.0);
  EXPECT_DOUBLE_EQ(c.sim.io.per_disk_bandwidth, 100e6);
  EXPECT_FALSE(c.generator);
}

TEST(Config, DumpParseRoundTrip) {
  for (const RunConfig& c : {default_mixed_suite(), steep_ramp_suite(), RunConfig{}}) {
    const std::string text = dump_config(c);
    EXPECT_EQ(dump_config(parse_config(text)), text);
  }
  RunConfig custom = default_mixed_suite();
  custom.sim.io.peak_io_cap = 0.025;
  custom.sim.transition.threshold_fraction = 0.6;
  custom.sim.candidates = {{6, 9}, {10, 13}};
  const RunConfig back = parse_config(dump_config(custom));
  EXPECT_DOUBLE_EQ(back.sim.io.peak_io_cap, 0.025);
  EXPECT_DOUBLE_EQ(back.sim.transition.threshold_fraction, 0.6);
  EXPECT_EQ(back.sim.candidates, custom.sim.candidates);
  EXPECT_EQ(back.generator->dgroups.size(), 2u);
  EXPECT_EQ(back.sim.truth.size(), 2u);
}

TEST(Config, UnknownKeysNameTheirPath) {
  EXPECT_NE(error_of(R"({"bogus": 1})").find("$.bogus"), std::string::npos);
  EXPECT_NE(error_of(R"({"io": {"peak": 0.05}})").find("$.io.peak"), std::string::npos);
  EXPECT_NE(error_of(R"({"generator": {"end_date": "2021-01-01", "dgroups": [{"dgroup": "A", "colour": 1}]}})")
                .find("dgroups[0].colour"),
            std::string::npos);
}

TEST(Config, RejectsOutOfRangeValues) {
  EXPECT_FALSE(error_of(R"({"io": {"peak_io_cap": 0.01, "avg_io": 0.02}})").empty());
  EXPECT_FALSE(error_of(R"({"transition": {"threshold_fraction": 1.5}})").empty());
  EXPECT_FALSE(error_of(R"({"reliability": {"mttr_days": -1}})").empty());
  EXPECT_FALSE(error_of(R"({"io": {"peak_io_cap": "high"}})").empty());
  EXPECT_FALSE(error_of(R"({"policy": "FAST"})").empty());
  EXPECT_FALSE(error_of("{not json").empty());
  EXPECT_FALSE(error_of(R"({"generator": {"dgroups": []}})").empty());
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, GeneratorTruthAttachesProfiles) {
  RunConfig c = steep_ramp_suite();
  c.sim.truth.clear();
  attach_generator_truth(c);
  ASSERT_EQ(c.sim.truth.count("S-2"), 1u);
  EXPECT_DOUBLE_EQ(c.sim.truth.at("S-2").wearout_slope, c.generator->dgroups[0].profile.wearout_slope);
  const RunConfig off = parse_config(R"({"truth_from_generator": false,
    "generator": {"end_date": "2021-01-01", "dgroups": [{"dgroup": "A", "count": 10,
      "first_deploy": "2020-01-01", "last_deploy": "2020-02-01",
      "profile": {"infancy_days": 0, "infancy_afr": 1, "phases": [{"duration_days": 10, "afr": 1}]}}]}})");
  EXPECT_TRUE(off.sim.truth.empty());
}

TEST(Config, ShippedConfigsMatchTheBuiltInSuites) {
  const std::filesystem::path dir = std::filesystem::path(DISKADAPT_SOURCE_DIR) / "configs";
  EXPECT_EQ(dump_config(load_config(dir / "default_mixed.json")), dump_config(default_mixed_suite()));
  EXPECT_EQ(dump_config(load_config(dir / "steep_ramp.json")), dump_config(steep_ramp_suite()));
}

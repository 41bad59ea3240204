#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "diskadapt/commands.hpp"
#include "diskadapt/suites.hpp"
#include "test_util.hpp"

using namespace diskadapt;
using namespace diskadapt::testing;

namespace {

RunConfig small_config() {
  RunConfig c;
  GeneratorSpec g;
  g.end_date = ymd(2022, 12, 31);
  DgroupSpec s;
  s.dgroup = "S";
  s.pattern = DeploymentPattern::kStep;
  s.count = 5000;
  s.first_deploy = s.last_deploy = ymd(2020, 1, 1);
  s.profile.infancy_days = 25;
  s.profile.infancy_afr = 8.0;
  s.profile.phases = {{500, 1.5}};
  s.profile.wearout_slope = 0.01;
  g.dgroups = {s};
  c.generator = g;
  attach_generator_truth(c);
  return c;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Commands, SimulateWritesAllOutputs) {
  const RunConfig c = small_config();
  const ClusterTrace trace = load_or_generate(c, std::nullopt, 3);
  const auto dir = scratch_dir("simulate");
  std::ostringstream log;
  EXPECT_EQ(cmd_simulate(c, trace, PolicyKind::kPacemaker, dir, log), kExitOk) << log.str();
  for (const char* f : {"report.csv", "rgroups.csv", "transitions.csv", "summary.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const auto report = lines_of(dir / "report.csv");
  ASSERT_GT(report.size(), 1u);
  EXPECT_EQ(report[0], "date,disks,transition_frac,reconstruction_frac,savings,underprotected,emergency");
  EXPECT_EQ(report.size(), static_cast<std::size_t>(trace.end_date - trace.start_date) + 2);
  EXPECT_EQ(lines_of(dir / "summary.csv").size(), 2u);
  EXPECT_GT(lines_of(dir / "transitions.csv").size(), 1u);
}

TEST(Commands, StaticReportsZeroSavingsEveryDay) {
  const RunConfig c = small_config();
  const ClusterTrace trace = load_or_generate(c, std::nullopt, 3);
  const auto dir = scratch_dir("static");
  std::ostringstream log;
  EXPECT_EQ(cmd_simulate(c, trace, PolicyKind::kStatic, dir, log), kExitOk);
  const auto report = lines_of(dir / "report.csv");
  for (std::size_t i = 1; i < report.size(); ++i) {
    const auto cells = split(report[i]);
    ASSERT_EQ(cells.size(), 7u);
    EXPECT_EQ(std::stod(cells[2]), 0.0);
    EXPECT_EQ(std::stod(cells[4]), 0.0);
  }
}

TEST(Commands, InvariantViolations) {
  const SimConfig sim;
  RunResult r;
  r.summary.policy = PolicyKind::kPacemaker;
  DailyReport day;
  day.date = ymd(2021, 1, 1);
  day.transition_frac = 0.2;
  r.reports = {day};
  EXPECT_EQ(invariant_violations(r, sim).size(), 1u);
  // Emergency days may exceed the cap.
  r.reports[0].emergency = true;
  EXPECT_TRUE(invariant_violations(r, sim).empty());
  // Under-protection is an invariant only for PACEMAKER.
  r.summary.underprotected_disk_days = 5;
  EXPECT_EQ(invariant_violations(r, sim).size(), 1u);
  r.summary.policy = PolicyKind::kReactive;
  EXPECT_TRUE(invariant_violations(r, sim).empty());
  r.audit.double_rdn = 1;
  EXPECT_EQ(invariant_violations(r, sim).size(), 1u);
}

TEST(Commands, ReactiveOverloadIsFlaggedAsEmergency) {
  const RunConfig c = small_config();
  const ClusterTrace trace = load_or_generate(c, std::nullopt, 3);
  const RunResult r = run(trace, PolicyKind::kReactive, c.sim);
  for (const DailyReport& d : r.reports) {
    if (d.transition_frac > c.sim.io.peak_io_cap) EXPECT_TRUE(d.emergency) << d.date.iso();
  }
  std::ostringstream log;
  EXPECT_EQ(cmd_simulate(c, trace, PolicyKind::kReactive, scratch_dir("reactive"), log), kExitOk) << log.str();
}

TEST(Commands, SingleValueSweepMatchesSimulate) {
  const RunConfig c = small_config();
  const ClusterTrace trace = load_or_generate(c, std::nullopt, 3);
  const auto rows = run_sweep(c, trace, SweepParam::kPeakIoCap, {c.sim.io.peak_io_cap});
  ASSERT_EQ(rows.size(), 1u);
  const RunSummary direct = run(trace, PolicyKind::kPacemaker, c.sim).summary;
  EXPECT_EQ(rows[0].summary.savings, direct.savings);
  EXPECT_EQ(rows[0].summary.plans, direct.plans);
  EXPECT_EQ(rows[0].ideal_savings, run(trace, PolicyKind::kIdeal, c.sim).summary.savings);
}

TEST(Commands, ThresholdSweepOnTheMixedSuite) {
  const RunConfig c = default_mixed_suite();
  const ClusterTrace trace = load_or_generate(c, std::nullopt, c.seed);
  const auto rows = run_sweep(c, trace, SweepParam::kThresholdFraction, {0.6, 0.75, 0.9});
  ASSERT_EQ(rows.size(), 3u);
  for (const SweepRow& r : rows) EXPECT_FALSE(r.failed) << r.value;
  // A lower threshold moves earlier and can only give up savings.
  EXPECT_LE(rows[0].summary.savings, rows[1].summary.savings);
  EXPECT_LE(rows[1].summary.savings, rows[2].summary.savings);
  EXPECT_LE(1.0 - rows[0].summary.savings / rows[2].summary.savings, 0.10);

  const auto dir = scratch_dir("sweep");
  std::ostringstream log;
  EXPECT_EQ(cmd_sweep(c, trace, SweepParam::kThresholdFraction, {0.75}, dir, log), kExitOk);
  const auto out = lines_of(dir / "sweep.csv");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(split(out[0])[0], "threshold_fraction");
  EXPECT_EQ(split(out[1]).back(), "ok");
}

TEST(Commands, SweepArgumentErrors) {
  const RunConfig c = small_config();
  EXPECT_EQ(parse_sweep_param("peak_io_cap"), SweepParam::kPeakIoCap);
  EXPECT_EQ(parse_sweep_param("threshold_fraction"), SweepParam::kThresholdFraction);
  EXPECT_THROW(parse_sweep_param("canaries"), std::invalid_argument);
  EXPECT_THROW(run_sweep(c, ClusterTrace{}, SweepParam::kPeakIoCap, {}), std::invalid_argument);
  EXPECT_THROW(run_sweep(c, ClusterTrace{}, SweepParam::kPeakIoCap, {1.5}), std::invalid_argument);
}

TEST(Commands, LoadOrGenerateNeedsATraceOrGenerator) {
  EXPECT_THROW(load_or_generate(RunConfig{}, std::nullopt, 1), ConfigError);
  const RunConfig c = small_config();
  const auto dir = scratch_dir("gen");
  std::ostringstream log;
  EXPECT_EQ(cmd_gen_trace(c, 3, dir / "trace.csv", log), kExitOk);
  const ClusterTrace from_file = load_or_generate(RunConfig{}, dir / "trace.csv", 99);
  const ClusterTrace generated = load_or_generate(c, std::nullopt, 3);
  EXPECT_EQ(from_file.events.size(), generated.events.size());
}

TEST(Commands, AfrFitWritesHazardAndPhases) {
  const RunConfig c = small_config();
  const ClusterTrace trace = load_or_generate(c, std::nullopt, 3);
  const auto dir = scratch_dir("afrfit");
  std::ostringstream log;
  EXPECT_EQ(cmd_afr_fit(c, trace, "S", ymd(2021, 6, 1), dir, log), kExitOk);
  const auto hazard = lines_of(dir / "hazard.csv");
  ASSERT_GT(hazard.size(), 300u);
  EXPECT_EQ(hazard[0], "age_day,at_risk,failures,cum_hazard,afr_pct");
  const auto phases = lines_of(dir / "phases.csv");
  ASSERT_GE(phases.size(), 2u);
  EXPECT_EQ(phases[0], "phase,start_age,end_age,representative_afr");
  // The useful-life level of 1.5%/yr is recovered within the estimator's noise.
  const double afr = std::stod(split(phases[1])[3]);
  EXPECT_GT(afr, 1.0);
  EXPECT_LT(afr, 2.2);
  EXPECT_THROW(cmd_afr_fit(c, trace, "missing", ymd(2021, 6, 1), dir, log), std::invalid_argument);
}

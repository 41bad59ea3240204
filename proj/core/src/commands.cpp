#include "diskadapt/commands.hpp"

#include <cstdio>
#include <future>
#include <ostream>
#include <stdexcept>

#include "diskadapt/report.hpp"

namespace diskadapt {

ClusterTrace load_or_generate(const RunConfig& config, const std::optional<std::filesystem::path>& trace_path,
                              std::uint64_t seed) {
  if (trace_path) return parse_trace(*trace_path);
  if (!config.generator) throw ConfigError("no --trace given and the config has no generator section");
  return generate_trace(*config.generator, seed);
}

std::vector<std::string> invariant_violations(const RunResult& result, const SimConfig& config) {
  std::vector<std::string> out = result.audit.messages;
  if (!result.audit.ok() && out.empty()) out.push_back("lifecycle audit failed");
  for (const DailyReport& r : result.reports) {
    if (r.transition_frac > config.io.peak_io_cap * (1 + 1e-9) && !r.emergency) {
      out.push_back("transition IO " + std::to_string(r.transition_frac) + " over the cap on " + r.date.iso());
      break;
    }
  }
  if (result.summary.policy == PolicyKind::kPacemaker && result.summary.underprotected_disk_days > 0) {
    out.push_back(std::to_string(result.summary.underprotected_disk_days) + " under-protected disk-days");
  }
  return out;
}

int cmd_simulate(const RunConfig& config, const ClusterTrace& trace, PolicyKind policy,
                 const std::filesystem::path& out_dir, std::ostream& log) {
  const RunResult result = run(trace, policy, config.sim);
  write_file_atomic(out_dir / "report.csv", [&](std::ostream& o) { write_report_csv(result, o); });
  write_file_atomic(out_dir / "rgroups.csv", [&](std::ostream& o) { write_rgroup_csv(result, o); });
  write_file_atomic(out_dir / "transitions.csv", [&](std::ostream& o) { write_transition_log(result, o); });
  write_file_atomic(out_dir / "summary.csv", [&](std::ostream& o) {
    write_summary_header(o);
    write_summary_row(result.summary, o);
  });
  write_summary_header(log);
  write_summary_row(result.summary, log);
  const auto violations = invariant_violations(result, config.sim);
  for (const std::string& v : violations) log << "violation: " << v << '\n';
  return violations.empty() ? kExitOk : kExitInvariant;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "peak_io_cap") return SweepParam::kPeakIoCap;
  if (name == "threshold_fraction") return SweepParam::kThresholdFraction;
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (peak_io_cap | threshold_fraction)");
}

std::vector<SweepRow> run_sweep(const RunConfig& config, const ClusterTrace& trace, SweepParam param,
                                const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  for (double v : values) {
    if (!(v > 0 && v <= 1)) throw std::invalid_argument("sweep values must lie in (0, 1]");
  }
  auto ideal = std::async(std::launch::async, [&] { return run(trace, PolicyKind::kIdeal, config.sim).summary; });
  std::vector<std::future<RunSummary>> runs;
  for (double v : values) {
    SimConfig sim = config.sim;
    if (param == SweepParam::kPeakIoCap) {
      sim.io.peak_io_cap = v;
      sim.io.avg_io = std::min(sim.io.avg_io, v);
    } else {
      sim.transition.threshold_fraction = v;
    }
    runs.push_back(std::async(std::launch::async, [&trace, sim] { return run(trace, PolicyKind::kPacemaker, sim).summary; }));
  }
  const RunSummary ideal_summary = ideal.get();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepRow row;
    row.value = values[i];
    row.summary = runs[i].get();
    row.ideal_savings = ideal_summary.savings;
    row.pct_of_ideal = ideal_summary.savings > 0 ? 100.0 * row.summary.savings / ideal_summary.savings : 100.0;
    row.failed = row.summary.failed();
    rows.push_back(row);
  }
  return rows;
}

int cmd_sweep(const RunConfig& config, const ClusterTrace& trace, SweepParam param, const std::vector<double>& values,
              const std::filesystem::path& out_dir, std::ostream& log) {
  const auto rows = run_sweep(config, trace, param, values);
  const std::string name = param == SweepParam::kPeakIoCap ? "peak_io_cap" : "threshold_fraction";
  auto writer = [&](std::ostream& o) {
    o << name << ",savings,ideal_savings,pct_of_ideal,emergency_plans,underprotected_disk_days,max_transition_frac,result\n";
    char buf[256];
    for (const SweepRow& r : rows) {
      std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,%.2f,%lld,%lld,%.6f,%s\n", r.value, r.summary.savings, r.ideal_savings,
                    r.pct_of_ideal, static_cast<long long>(r.summary.emergency_plans),
                    static_cast<long long>(r.summary.underprotected_disk_days), r.summary.max_transition_frac,
                    r.failed ? "FAIL" : "ok");
      o << buf;
    }
  };
  write_file_atomic(out_dir / "sweep.csv", writer);
  writer(log);
  bool any_failed = false;
  for (const SweepRow& r : rows) any_failed = any_failed || r.failed;
  return any_failed ? kExitSweepFailure : kExitOk;
}

int cmd_afr_fit(const RunConfig& config, const ClusterTrace& trace, const std::string& dgroup, Date as_of,
                const std::filesystem::path& out_dir, std::ostream& log) {
  const ExposureTable table = exposure_table(trace, dgroup, as_of);
  if (table.empty()) throw std::invalid_argument("no exposure for dgroup '" + dgroup + "' before " + as_of.iso());
  const HazardCurve curve = smoothed_hazard(table, config.sim.kernel, config.sim.support);
  write_file_atomic(out_dir / "hazard.csv", [&](std::ostream& o) { curve.write_csv(o); });

  const std::int32_t inf = infancy_end(curve, config.sim.infancy);
  const bool found = inf <= curve.support_end();
  log << "dgroup " << dgroup << ": support [" << curve.support_begin() << ", " << curve.support_end() << "], ";
  if (found) {
    log << "infancy ends at age " << inf << '\n';
  } else {
    log << "infancy end not detected\n";
  }
  write_file_atomic(out_dir / "phases.csv", [&](std::ostream& o) {
    o << "phase,start_age,end_age,representative_afr\n";
    if (!curve.has_support()) return;
    const std::int32_t from = found ? inf : curve.support_begin();
    const UsefulLifePhases phases =
        decompose_useful_life(curve, config.sim.transition.phase_tolerance, config.sim.transition.max_phases, from);
    char buf[128];
    for (std::size_t i = 0; i < phases.phases.size(); ++i) {
      const auto& p = phases.phases[i];
      std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.6f\n", i, p.start_age, p.end_age, p.representative_afr);
      o << buf;
      log << "phase " << buf;
    }
  });
  return kExitOk;
}

int cmd_gen_trace(const RunConfig& config, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log) {
  if (!config.generator) throw ConfigError("config has no generator section");
  const ClusterTrace trace = generate_trace(*config.generator, seed);
  write_file_atomic(out, [&](std::ostream& o) { write_trace(trace, o); });
  log << "wrote " << trace.events.size() << " events to " << out.string() << '\n';
  return kExitOk;
}

int cmd_convert(const std::filesystem::path& input_dir, const std::filesystem::path& out, std::ostream& log) {
  std::vector<std::string> warnings;
  const ClusterTrace trace = convert_daily_status(input_dir, &warnings);
  for (const std::string& w : warnings) log << "warning: " << w << '\n';
  write_file_atomic(out, [&](std::ostream& o) { write_trace(trace, o); });
  log << "wrote " << trace.events.size() << " events to " << out.string() << '\n';
  return kExitOk;
}

}  // namespace diskadapt

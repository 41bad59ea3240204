#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diskadapt/config.hpp"
#include "diskadapt/simulator.hpp"

namespace diskadapt {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitInvariant = 2, kExitSweepFailure = 3 };

/// The trace at `trace_path`, or the config's generator output for `seed`.
ClusterTrace load_or_generate(const RunConfig& config, const std::optional<std::filesystem::path>& trace_path,
                              std::uint64_t seed);

/// Invariant violations of a finished run; empty when clean.
std::vector<std::string> invariant_violations(const RunResult& result, const SimConfig& config);

/// Writes report.csv, rgroups.csv, transitions.csv and summary.csv under
/// `out_dir`. Returns kExitInvariant on violations.
int cmd_simulate(const RunConfig& config, const ClusterTrace& trace, PolicyKind policy,
                 const std::filesystem::path& out_dir, std::ostream& log);

enum class SweepParam { kPeakIoCap, kThresholdFraction };
SweepParam parse_sweep_param(const std::string& name);

struct SweepRow {
  double value = 0.0;
  RunSummary summary;
  double ideal_savings = 0.0;
  double pct_of_ideal = 0.0;
  bool failed = false;
};

/// PACEMAKER once per value plus one IDEAL reference run.
std::vector<SweepRow> run_sweep(const RunConfig& config, const ClusterTrace& trace, SweepParam param,
                                const std::vector<double>& values);

/// Writes sweep.csv under `out_dir`; kExitSweepFailure when any row failed.
int cmd_sweep(const RunConfig& config, const ClusterTrace& trace, SweepParam param, const std::vector<double>& values,
              const std::filesystem::path& out_dir, std::ostream& log);

/// Writes hazard.csv and phases.csv for one Dgroup.
int cmd_afr_fit(const RunConfig& config, const ClusterTrace& trace, const std::string& dgroup, Date as_of,
                const std::filesystem::path& out_dir, std::ostream& log);

int cmd_gen_trace(const RunConfig& config, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log);

int cmd_convert(const std::filesystem::path& input_dir, const std::filesystem::path& out, std::ostream& log);

}  // namespace diskadapt

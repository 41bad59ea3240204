// diskadapt: trace generation, AFR fitting, simulation and sweeps.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diskadapt/commands.hpp"
#include "diskadapt/suites.hpp"

namespace da = diskadapt;

namespace {

struct Common {
  std::string config;
  std::string suite;
  std::string trace;
  std::string out;
  std::string policy;
  std::optional<std::uint64_t> seed;
};

enum Options : unsigned { kConfig = 1, kTrace = 2, kPolicy = 4 };

void add_common(CLI::App* cmd, Common& c, const std::string& out_help, unsigned options) {
  if (options & kConfig) {
    cmd->add_option("--config", c.config, "JSON run configuration");
    cmd->add_option("--suite", c.suite, "Built-in synthetic suite instead of --config")
        ->check(CLI::IsMember({"mixed", "steep"}));
    cmd->add_option("--seed", c.seed, "Generator seed; overrides the config");
  }
  if (options & kTrace) cmd->add_option("--trace", c.trace, "Trace CSV; default: generate from the config");
  if (options & kPolicy) {
    cmd->add_option("--policy", c.policy, "PACEMAKER | REACTIVE | IDEAL | STATIC (default PACEMAKER)");
  }
  cmd->add_option("--out", c.out, out_help);
}

da::RunConfig resolve_config(const Common& c) {
  if (!c.config.empty() && !c.suite.empty()) throw da::ConfigError("--config and --suite are mutually exclusive");
  if (c.suite == "mixed") return da::default_mixed_suite();
  if (c.suite == "steep") return da::steep_ramp_suite();
  if (!c.config.empty()) return da::load_config(c.config);
  return da::RunConfig{};
}

std::optional<std::filesystem::path> trace_path(const Common& c) {
  if (c.trace.empty()) return std::nullopt;
  return std::filesystem::path(c.trace);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Disk-adaptive redundancy orchestration and trace-driven cluster simulation.\n"
      "Defaults: peak IO cap 5%, average IO 1%, threshold 75% of tolerated AFR, 3000 canaries,\n"
      "Rgroup0 scheme 6-of-9 tolerating 16%/yr, 100 MB/s per disk, MTTR 0.2 days."};
  app.require_subcommand(1);

  Common sim_opts, sweep_opts, fit_opts, gen_opts, conv_opts;
  auto* simulate = app.add_subcommand("simulate", "Replay a trace under one policy");
  add_common(simulate, sim_opts, "Output directory (default: config output_dir)", kConfig | kTrace | kPolicy);

  auto* sweep = app.add_subcommand("sweep", "PACEMAKER sensitivity sweep against IDEAL");
  add_common(sweep, sweep_opts, "Output directory (default: config output_dir)", kConfig | kTrace);
  std::string param = "peak_io_cap";
  std::vector<double> values;
  sweep->add_option("--param", param, "peak_io_cap | threshold_fraction")->capture_default_str();
  sweep->add_option("--values", values, "Parameter values in (0, 1]")->required()->delimiter(',');

  auto* fit = app.add_subcommand("afr-fit", "Export one Dgroup's hazard curve and phases");
  add_common(fit, fit_opts, "Output directory (default: config output_dir)", kConfig | kTrace);
  std::string dgroup, as_of;
  fit->add_option("--dgroup", dgroup, "Dgroup label")->required();
  fit->add_option("--as-of", as_of, "Exclusive cutoff date YYYY-MM-DD (default: day after trace end)");

  auto* gen = app.add_subcommand("gen-trace", "Write the config's synthetic trace");
  add_common(gen, gen_opts, "Trace CSV to write", kConfig);
  gen->get_option("--out")->required();

  auto* conv = app.add_subcommand("convert", "Convert a directory of daily status CSVs");
  add_common(conv, conv_opts, "Trace CSV to write", 0);
  std::string input;
  conv->add_option("--input", input, "Directory of YYYY-MM-DD.csv snapshots")->required();
  conv->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? da::kExitOk : da::kExitError;
  }

  try {
    if (simulate->parsed()) {
      const da::RunConfig cfg = resolve_config(sim_opts);
      const auto trace = da::load_or_generate(cfg, trace_path(sim_opts), sim_opts.seed.value_or(cfg.seed));
      const auto policy = sim_opts.policy.empty() ? cfg.policy : da::parse_policy(sim_opts.policy);
      return da::cmd_simulate(cfg, trace, policy, sim_opts.out.empty() ? cfg.output_dir : sim_opts.out, std::cout);
    }
    if (sweep->parsed()) {
      const da::RunConfig cfg = resolve_config(sweep_opts);
      const auto trace = da::load_or_generate(cfg, trace_path(sweep_opts), sweep_opts.seed.value_or(cfg.seed));
      return da::cmd_sweep(cfg, trace, da::parse_sweep_param(param), values,
                           sweep_opts.out.empty() ? cfg.output_dir : sweep_opts.out, std::cout);
    }
    if (fit->parsed()) {
      const da::RunConfig cfg = resolve_config(fit_opts);
      const auto trace = da::load_or_generate(cfg, trace_path(fit_opts), fit_opts.seed.value_or(cfg.seed));
      const da::Date cutoff = as_of.empty() ? trace.end_date + 1 : da::Date::parse(as_of);
      return da::cmd_afr_fit(cfg, trace, dgroup, cutoff, fit_opts.out.empty() ? cfg.output_dir : fit_opts.out,
                             std::cout);
    }
    if (gen->parsed()) {
      const da::RunConfig cfg = resolve_config(gen_opts);
      return da::cmd_gen_trace(cfg, gen_opts.seed.value_or(cfg.seed), gen_opts.out, std::cout);
    }
    if (conv->parsed()) return da::cmd_convert(input, conv_opts.out, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return da::kExitError;
  }
  return da::kExitError;
}

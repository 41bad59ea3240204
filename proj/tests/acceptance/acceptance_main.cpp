// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails. `--criterion N` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "diskadapt/afr.hpp"
#include "diskadapt/commands.hpp"
#include "diskadapt/orchestrator.hpp"
#include "diskadapt/reliability.hpp"
#include "diskadapt/simulator.hpp"
#include "diskadapt/suites.hpp"

using namespace diskadapt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Units in the last place between a and b.
double ulps(double a, double b) {
  if (a == b) return 0.0;
  const double spacing = std::nextafter(std::max(std::abs(a), std::abs(b)), kNever) -
                         std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) / spacing;
}

class Suites {
public:
  const ClusterTrace& trace(const std::string& name) {
    auto it = traces_.find(name);
    if (it == traces_.end()) {
      const RunConfig& c = config(name);
      it = traces_.emplace(name, load_or_generate(c, std::nullopt, c.seed)).first;
    }
    return it->second;
  }

  const RunConfig& config(const std::string& name) {
    auto it = configs_.find(name);
    if (it == configs_.end()) it = configs_.emplace(name, name == "mixed" ? default_mixed_suite() : steep_ramp_suite()).first;
    return it->second;
  }

  // Runs every missing (suite, policy) pair concurrently.
  void prefetch(const std::vector<std::pair<std::string, PolicyKind>>& wanted) {
    std::vector<std::pair<std::pair<std::string, PolicyKind>, std::future<RunResult>>> jobs;
    for (const auto& key : wanted) {
      if (runs_.count(key)) continue;
      const ClusterTrace& t = trace(key.first);
      const SimConfig& sim = config(key.first).sim;
      jobs.emplace_back(key, std::async(std::launch::async, [&t, &sim, p = key.second] { return run(t, p, sim); }));
    }
    for (auto& [key, f] : jobs) runs_.emplace(key, f.get());
  }

  const RunResult& result(const std::string& name, PolicyKind p) {
    prefetch({{name, p}});
    return runs_.at({name, p});
  }

  const std::map<std::pair<std::string, PolicyKind>, RunResult>& all_runs() const { return runs_; }

private:
  std::map<std::string, RunConfig> configs_;
  std::map<std::string, ClusterTrace> traces_;
  std::map<std::pair<std::string, PolicyKind>, RunResult> runs_;
};

Suites suites;

Outcome mttdl_anchors() {
  double worst_exact = 0.0;
  double lo = kNever, hi = 0.0;
  for (double afr = 1.0; afr <= 5.0 + 1e-9; afr += 0.25) {
    for (double mttr = 0.1; mttr <= 0.5 + 1e-9; mttr += 0.05) {
      const double r7 = mttdl({6, 9}, afr, mttr) / mttdl({7, 10}, afr, mttr);
      worst_exact = std::max(worst_exact, std::abs(r7 - 5.0 / 3.0) / (5.0 / 3.0));
      const double r8 = mttdl({6, 9}, afr, mttr) / mttdl({6, 8}, afr, mttr);
      lo = std::min(lo, r8);
      hi = std::max(hi, r8);
    }
  }
  const bool pass = worst_exact <= 1e-12 && lo >= 1e3 && hi <= 1e5;
  return {pass, fmt("6-of-9/7-of-10 max rel dev %.2e (tol 1e-12); 6-of-9/6-of-8 in [%.3g, %.3g] (need [1e3, 1e5])",
                    worst_exact, lo, hi)};
}

Outcome estimator_fidelity() {
  GeneratorSpec spec;
  DgroupSpec s;
  s.dgroup = "C";
  s.pattern = DeploymentPattern::kStep;
  s.count = 10000;
  s.first_deploy = s.last_deploy = Date::from_ymd(2020, 1, 1);
  s.step_days = 1;
  s.profile.infancy_days = 0;
  s.profile.infancy_afr = 2.0;
  s.profile.phases = {{1, 2.0}};
  s.profile.wearout_slope = 0.0;
  spec.dgroups = {s};
  spec.end_date = s.first_deploy + 730;
  const ClusterTrace trace = generate_trace(spec, 2020);
  const ExposureTable table = exposure_table(trace, "C", spec.end_date);
  const KernelConfig kernel;
  const HazardCurve curve = smoothed_hazard(table, kernel);

  double worst = 0.0;
  std::int32_t worst_age = -1;
  const std::int32_t from = curve.support_begin() + kernel.bandwidth;
  const std::int32_t to = curve.support_end() - kernel.bandwidth;
  for (std::int32_t a = from; a <= to; ++a) {
    const double e = std::abs(curve.afr_at(a) - 2.0) / 2.0;
    if (e > worst) {
      worst = e;
      worst_age = a;
    }
  }

  const std::vector<double> H = nelson_aalen(table);
  double worst_na = 0.0;
  double prev = 0.0;
  for (std::int32_t i = 0; i <= table.max_age(); ++i) {
    const double expected =
        table.at_risk(i) > 0 ? static_cast<double>(table.failures(i)) / static_cast<double>(table.at_risk(i)) : 0.0;
    worst_na = std::max(worst_na, std::abs((H[static_cast<std::size_t>(i)] - prev) - expected));
    prev = H[static_cast<std::size_t>(i)];
  }
  const bool pass = from <= to && worst <= 0.15 && worst_na <= 1e-12;
  return {pass, fmt("smoothed AFR max rel error %.3f at age %d over interior ages [%d, %d] (tol 0.15); "
                    "Nelson-Aalen increment max abs error %.2e (tol 1e-12)",
                    worst, worst_age, from, to, worst_na)};
}

Outcome cap_invariant() {
  suites.prefetch({{"mixed", PolicyKind::kPacemaker}, {"mixed", PolicyKind::kReactive}, {"mixed", PolicyKind::kIdeal}});
  const RunSummary& p = suites.result("mixed", PolicyKind::kPacemaker).summary;
  const RunSummary& r = suites.result("mixed", PolicyKind::kReactive).summary;
  const bool pass = p.max_transition_frac <= 0.05 && p.emergency_plans == 0 && r.max_transition_frac > 0.5 &&
                    r.underprotected_disk_days > 0;
  return {pass, fmt("PACEMAKER max daily fraction %.4f (<= 0.05), %lld EMERGENCY plans (0); "
                    "REACTIVE max %.4f (> 0.5), %lld under-protected disk-days (> 0)",
                    p.max_transition_frac, static_cast<long long>(p.emergency_plans), r.max_transition_frac,
                    static_cast<long long>(r.underprotected_disk_days))};
}

Outcome savings_capture() {
  suites.prefetch({{"mixed", PolicyKind::kPacemaker}, {"mixed", PolicyKind::kIdeal}});
  const double p = suites.result("mixed", PolicyKind::kPacemaker).summary.savings;
  const double i = suites.result("mixed", PolicyKind::kIdeal).summary.savings;
  const double ratio = i > 0 ? p / i : 0.0;
  return {i > 0 && ratio >= 0.95, fmt("PACEMAKER savings %.4f vs IDEAL %.4f: %.1f%% (>= 95%%)", p, i, 100 * ratio)};
}

Outcome io_reduction() {
  const RunSummary& p = suites.result("mixed", PolicyKind::kPacemaker).summary;
  const double ratio = p.reencode_equivalent_bytes > 0 ? p.transition_bytes / p.reencode_equivalent_bytes : kNever;
  return {ratio <= 0.10, fmt("transition bytes %.3e vs all-REENCODE %.3e: %.1f%% (<= 10%%)", p.transition_bytes,
                             p.reencode_equivalent_bytes, 100 * ratio)};
}

Outcome under_protection() {
  suites.prefetch({{"mixed", PolicyKind::kPacemaker}, {"steep", PolicyKind::kPacemaker}});
  const auto m = suites.result("mixed", PolicyKind::kPacemaker).summary.underprotected_disk_days;
  const auto s = suites.result("steep", PolicyKind::kPacemaker).summary.underprotected_disk_days;
  return {m == 0 && s == 0, fmt("PACEMAKER under-protected disk-days: mixed %lld, steep ramp %lld (0)",
                                static_cast<long long>(m), static_cast<long long>(s))};
}

Outcome sensitivity_shape() {
  const std::vector<double> caps = {0.015, 0.025, 0.035, 0.05, 0.075};
  const auto rows = run_sweep(suites.config("steep"), suites.trace("steep"), SweepParam::kPeakIoCap, caps);
  bool low_fail = false;
  double at5 = 0.0;
  std::string table;
  for (const SweepRow& r : rows) {
    if (r.value <= 0.025 && r.failed) low_fail = true;
    if (r.value == 0.05) at5 = r.failed ? 0.0 : r.pct_of_ideal;
    table += fmt(" %.1f%%:%s/%.1f%%", 100 * r.value, r.failed ? "FAIL" : "ok", r.pct_of_ideal);
  }
  return {low_fail && at5 >= 95.0,
          "peak-cap sweep" + table + fmt("; low-end failure %s, %.1f%% of IDEAL at 5%% (>= 95%%)",
                                         low_fail ? "yes" : "no", at5)};
}

Outcome cost_formulas() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> k(2, 60), f(1, 6);
  std::uniform_int_distribution<std::int64_t> disks(1, 100000);
  std::uniform_real_distribution<double> tb(0.1, 40.0);
  double worst_empty = 0.0, worst_bulk = 0.0, worst_re = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const int ck = k(rng), nk = k(rng);
    const Scheme cur{ck, ck + f(rng)}, next{nk, nk + f(rng)};
    const double cap = std::round(tb(rng) * 1e3) * 1e9;
    const std::int64_t m = disks(rng);
    const double dm = static_cast<double>(m);
    const IoCost e = transition_cost(Mechanism::kEmpty, cur, next, m, cap, m * 10);
    worst_empty = std::max(worst_empty, ulps(e.total(), 2.0 * cap * dm));
    const IoCost b = transition_cost(Mechanism::kBulkParity, cur, next, 1, cap, 1);
    const double per_disk = (1.0 + static_cast<double>(next.n - next.k) / next.k) *
                            (static_cast<double>(cur.k) / cur.n) * cap;
    worst_bulk = std::max(worst_bulk, ulps(b.total(), per_disk));
    const IoCost r = transition_cost(Mechanism::kReencode, cur, next, m, cap, m * 10);
    const double floor = cur.k * e.total();
    if (r.total() < floor) worst_re = std::max(worst_re, ulps(r.total(), floor));
  }
  const bool pass = worst_empty <= 1 && worst_bulk <= 1 && worst_re <= 1;
  return {pass, fmt("%d draws: EMPTY max %.0f ulp, BULK_PARITY per-disk max %.0f ulp, REENCODE shortfall below "
                    "k x EMPTY max %.0f ulp (each <= 1)",
                    draws, worst_empty, worst_bulk, worst_re)};
}

Outcome lifecycle_audits() {
  std::vector<std::pair<std::string, PolicyKind>> all;
  for (const char* s : {"mixed", "steep"}) {
    for (PolicyKind p : {PolicyKind::kPacemaker, PolicyKind::kReactive, PolicyKind::kIdeal, PolicyKind::kStatic}) {
      all.emplace_back(s, p);
    }
  }
  suites.prefetch(all);
  AuditReport sum;
  std::string first;
  for (const auto& [key, r] : suites.all_runs()) {
    sum.double_rdn += r.audit.double_rdn;
    sum.canary_moves += r.audit.canary_moves;
    sum.avg_io += r.audit.avg_io;
    sum.partition += r.audit.partition;
    if (first.empty() && !r.audit.messages.empty()) {
      first = key.first + "/" + std::string(to_string(key.second)) + ": " + r.audit.messages.front();
    }
  }
  const bool pass = sum.double_rdn == 0 && sum.canary_moves == 0 && sum.avg_io == 0 && sum.partition == 0;
  return {pass, fmt("%zu runs: double RDn %lld, canary moves %lld, average-IO %lld, partition %lld (all 0)",
                    suites.all_runs().size(), static_cast<long long>(sum.double_rdn),
                    static_cast<long long>(sum.canary_moves), static_cast<long long>(sum.avg_io),
                    static_cast<long long>(sum.partition)) +
                    (first.empty() ? "" : "; first: " + first)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "MTTDL anchors", mttdl_anchors},
      {2, "estimator fidelity", estimator_fidelity},
      {3, "cap invariant", cap_invariant},
      {4, "savings capture", savings_capture},
      {5, "IO reduction", io_reduction},
      {6, "under-protection", under_protection},
      {7, "sensitivity shape", sensitivity_shape},
      {8, "cost formulas", cost_formulas},
      {9, "lifecycle audits", lifecycle_audits},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only != 0 && (only < 1 || only > static_cast<int>(criteria.size()))) {
    std::fprintf(stderr, "criterion must be in [1, %zu]\n", criteria.size());
    return 2;
  }
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.number != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %d. %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

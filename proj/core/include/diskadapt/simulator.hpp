#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diskadapt/afr.hpp"
#include "diskadapt/orchestrator.hpp"
#include "diskadapt/reliability.hpp"
#include "diskadapt/trace.hpp"

namespace diskadapt {

enum class PolicyKind : std::uint8_t { kPacemaker, kReactive, kIdeal, kStatic };

std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view text);

struct SimConfig {
  ReliabilityConfig reliability;
  IoPolicy io;
  TransitionPolicy transition;
  std::vector<Scheme> candidates = scheme_grid();
  KernelConfig kernel;
  SupportOptions support;
  InfancyOptions infancy;
  // Ground-truth AFR profiles by dgroup. Dgroups without one are scored
  // against the hindsight curve estimated from the whole trace.
  std::map<std::string, SyntheticAfrProfile> truth;

  void validate() const;
};

struct DailyReport {
  Date date;
  std::int64_t disks = 0;
  double transition_bytes = 0.0;
  double reconstruction_bytes = 0.0;
  double transition_frac = 0.0;
  double reconstruction_frac = 0.0;
  double savings = 0.0;
  std::int64_t underprotected = 0;
  bool emergency = false;
  // Raw and logical (scheme0-equivalent and adaptive) capacity for weighting.
  double logical_static = 0.0;
  double logical_adaptive = 0.0;
  std::map<int, std::int64_t> rgroup_disks;
  std::map<int, double> rgroup_transition_bytes;
};

struct RgroupRecord {
  int id = 0;
  RgroupKind kind = RgroupKind::kDefault;
  std::optional<std::string> origin_batch;
  Date created;
  std::optional<Date> retired;
  // Scheme history as (date, scheme).
  std::vector<std::pair<Date, Scheme>> schemes;
};

struct PlanRecord {
  TransitionPlan plan;
  Date start;
  std::optional<Date> completed;
  double executed_bytes = 0.0;
  // Triggered by a reliability need rather than an RDn or purge.
  bool reliability_rup = false;
};

struct AuditReport {
  std::int64_t double_rdn = 0;
  std::int64_t canary_moves = 0;
  std::int64_t avg_io = 0;
  std::int64_t partition = 0;
  std::int64_t ledger_cap = 0;
  std::vector<std::string> messages;

  std::int64_t total() const { return double_rdn + canary_moves + avg_io + partition + ledger_cap; }
  bool ok() const { return total() == 0; }
};

struct RunSummary {
  PolicyKind policy = PolicyKind::kStatic;
  std::int64_t days = 0;
  double max_transition_frac = 0.0;
  // Capacity-day weighted space savings.
  double savings = 0.0;
  std::int64_t underprotected_disk_days = 0;
  std::int64_t emergency_plans = 0;
  std::int64_t emergency_days = 0;
  std::int64_t plans = 0;
  double transition_bytes = 0.0;
  double reencode_equivalent_bytes = 0.0;
  double reconstruction_bytes = 0.0;

  /// A reliability RUp missed its deadline or data went under-protected.
  bool failed() const { return emergency_plans > 0 || underprotected_disk_days > 0; }
};

struct RunResult {
  std::vector<DailyReport> reports;
  std::vector<RgroupRecord> rgroups;
  std::vector<PlanRecord> plans;
  AuditReport audit;
  RunSummary summary;
};

struct CapacityShare {
  double capacity = 0.0;
  Scheme scheme;
};

/// 1 - logical_static / logical_adaptive, where logical capacity under a
/// scheme is raw capacity * k / n. Throws std::invalid_argument when empty.
double space_savings(const std::vector<CapacityShare>& disks, const Scheme& scheme0);

/// Rebuild IO for failed disks: k * capacity read, capacity written, each.
IoCost reconstruction_io(const std::vector<CapacityShare>& failed);

/// Replays `trace` under `policy`. Deterministic for fixed inputs.
RunResult run(const ClusterTrace& trace, PolicyKind policy, const SimConfig& config);

}  // namespace diskadapt

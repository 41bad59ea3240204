#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "diskadapt/afr.hpp"
#include "diskadapt/date.hpp"
#include "diskadapt/reliability.hpp"

namespace diskadapt {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kNever = std::numeric_limits<double>::infinity();

enum class Mechanism : std::uint8_t { kEmpty, kBulkParity, kReencode };
enum class Urgency : std::uint8_t { kProactive, kPurge, kEmergency };
enum class RgroupKind : std::uint8_t { kDefault, kTrickleShared, kStepDedicated };

std::string_view to_string(Mechanism m);
std::string_view to_string(Urgency u);
std::string_view to_string(RgroupKind k);

struct IoPolicy {
  double peak_io_cap = 0.05;
  double avg_io = 0.01;
  double per_disk_bandwidth = 100e6;  // bytes/s

  double disk_daily_bytes() const { return per_disk_bandwidth * kSecondsPerDay; }
  void validate() const;
};

struct TransitionPolicy {
  std::int64_t canary_count = 3000;
  double threshold_fraction = 0.75;
  double phase_tolerance = 2.0;
  int max_phases = 8;
  std::int64_t min_rgroup_size = 1000;
  // Overhead a new trickle Rgroup must beat every existing one by.
  double min_new_rgroup_savings = 0.02;
  std::int32_t projection_window = 60;
  // Disks sharing a batch tag and deployed within this many days form a step.
  std::int32_t step_window_days = 7;
  double fill_fraction = 0.60;
  double max_fill = 0.95;

  void validate() const;
};

struct IoCost {
  double read = 0.0;
  double write = 0.0;
  double total() const { return read + write; }
  friend bool operator==(const IoCost&, const IoCost&) = default;
};

/// Largest number of disks that can be emptied out of a group of
/// `rgroup_size` while the rest stay under max_fill.
std::int64_t empty_capacity(std::int64_t rgroup_size, double fill_fraction, double max_fill);

/// Bytes moved by `mechanism` when `disks` disks of `capacity` bytes go from
/// `cur` to `next` inside a group of `rgroup_size`. Throws
/// std::invalid_argument for BULK_PARITY on a partial group or EMPTY beyond
/// the free space.
IoCost transition_cost(Mechanism mechanism, const Scheme& cur, const Scheme& next, std::int64_t disks,
                       double capacity, std::int64_t rgroup_size, double fill_fraction = 0.60,
                       double max_fill = 0.95);

struct MechanismContext {
  Scheme cur;
  Scheme next;
  std::int64_t disks = 0;
  double capacity = 0.0;
  std::int64_t rgroup_size = 0;
  double fill_fraction = 0.60;
  double max_fill = 0.95;
};

bool mechanism_feasible(Mechanism m, const MechanismContext& ctx);
/// Cheapest feasible mechanism; ties prefer EMPTY, then BULK_PARITY.
Mechanism pick_mechanism(const MechanismContext& ctx);

/// Days to move `bytes` at `fraction` of `bandwidth_per_day`.
std::int32_t paced_days(double bytes, double bandwidth_per_day, double fraction);

/// Residency (days after completion) a transition needs to pay for itself
/// under the average-IO constraint: io_days / avg_io - duration.
double worth_min_residency(double per_disk_bytes, std::int32_t duration_days, const IoPolicy& io);

struct Rgroup {
  int id = 0;
  Scheme scheme;
  RgroupKind kind = RgroupKind::kDefault;
  std::optional<std::string> origin_batch;
  std::set<std::int32_t> members;
  // Non-emergency and emergency transition bytes charged per day.
  std::map<std::int32_t, double> io_ledger;
  std::map<std::int32_t, double> emergency_ledger;
  // Schemes for which a step RUp trigger has already fired.
  std::set<Scheme> fired;
  bool retired = false;

  std::int64_t size() const { return static_cast<std::int64_t>(members.size()); }
};

struct TransitionPlan {
  int id = 0;
  std::vector<std::int32_t> disks;
  int from_rgroup = 0;
  int to_rgroup = 0;
  Scheme from_scheme;
  Scheme to_scheme;
  Mechanism mechanism = Mechanism::kEmpty;
  double total_read_bytes = 0.0;
  double total_write_bytes = 0.0;
  Date earliest_start;
  std::optional<Date> deadline;
  Urgency urgency = Urgency::kProactive;
  // Whole-group plan: the source group changes scheme in place and, when
  // to_rgroup differs, its members then merge into to_rgroup.
  bool whole_group = false;
  // Runs at up to full cluster bandwidth.
  bool uncapped = false;
  // Cost of the same decision executed by REENCODE.
  double reencode_bytes = 0.0;

  double total_bytes() const { return total_read_bytes + total_write_bytes; }
  bool is_rdn() const { return to_scheme.overhead() < from_scheme.overhead(); }
};

/// Per-Rgroup rate limiter. Non-emergency plans charged to one Rgroup share
/// peak_io_cap of its bandwidth by water-filling; EMERGENCY plans additionally
/// run at least fast enough to meet their deadline.
class RateLimiter {
public:
  struct DayResult {
    std::map<int, double> per_plan;
    std::map<int, double> capped_per_rgroup;
    std::map<int, double> emergency_per_rgroup;
    double total = 0.0;
  };

  void submit(const TransitionPlan& plan, int charged_rgroup);
  void forget(int plan_id);
  bool active(int plan_id) const { return jobs_.count(plan_id) > 0; }
  double remaining(int plan_id) const;
  bool idle() const { return jobs_.empty(); }
  std::vector<int> plans_on(int rgroup_id) const;

  /// Executes one day. `allowance(rgroup)` is the group's capped daily bytes;
  /// uncapped plans share `cluster_daily_bytes`.
  DayResult run_day(Date today, const std::function<double(int)>& allowance, double cluster_daily_bytes);

private:
  struct Job {
    int rgroup = 0;
    double remaining = 0.0;
    Urgency urgency = Urgency::kProactive;
    std::optional<Date> deadline;
    Date earliest;
    bool uncapped = false;
  };
  std::map<int, Job> jobs_;
};

/// Water-fills `budget` across demands, smallest first. Returns grants.
std::vector<double> water_fill(const std::vector<double>& demands, double budget);

/// Age at which the curve first exceeds `limit` at or after `from_age`.
/// Beyond the support the last supported value is held flat. kNever if the
/// curve never exceeds the limit.
double first_crossing_age(const HazardCurve& curve, double limit, std::int32_t from_age);

/// RUp initiation date for a trickle disk: the date its age reaches the first
/// crossing of the scheme's AFR ceiling, minus the paced transition length.
/// nullopt means no RUp is needed.
std::optional<Date> rup_date_trickle(Date deploy, const HazardCurve& known_curve, const Scheme& scheme,
                                     const SchemeTable& table, std::int32_t from_age,
                                     std::int32_t transition_days);

/// Trailing-window fit for a step group, restricted to ages >= min_age (the
/// end of infancy). nullopt when fewer than half a window of days qualify.
std::optional<AfrProjection> live_projection(const HazardCurve& curve, const TransitionPolicy& tp,
                                             std::int32_t min_age = 0);

/// Live AFR at `age`: the fit extrapolated forward, never below the fitted
/// value at the support end.
double live_afr(const AfrProjection& p, std::int32_t age);

struct StepTrigger {
  Date date;
  double live_afr = 0.0;
  double threshold = 0.0;
};

/// Fires when the observed smoothed AFR >= threshold_fraction *
/// ceiling(scheme), at most once per (rgroup, scheme); records the firing in
/// rgroup.fired.
std::optional<StepTrigger> rup_check_step(Rgroup& rgroup, double observed_afr, Date today,
                                          const SchemeTable& table, const TransitionPolicy& tp);

/// Inputs to the Rgroup planner.
struct PlanRequest {
  std::int64_t disks = 0;
  double capacity = 0.0;
  Scheme current;
  // AFR the target must be viable at today.
  double afr_now = 0.0;
  // true for an RDn: candidates must have lower overhead; otherwise higher.
  bool rdn = true;
  // Residency after completion, in days, for a candidate scheme whose
  // transition finishes `completion_days` from today. kNever for unbounded.
  std::function<double(const Scheme&, std::int32_t completion_days)> residency;
  // Mechanism and paced duration for a candidate.
  std::function<std::pair<IoCost, std::int32_t>(const Scheme&)> cost;
  bool trickle = false;
};

struct TargetChoice {
  Scheme scheme;
  // Existing Rgroup to join, or -1 when a new group should be created.
  int rgroup = -1;
  double residency_days = 0.0;
  IoCost cost;
  std::int32_t duration_days = 0;
};

/// Picks the lowest-overhead viable scheme passing the worth test. Trickle
/// disks join the group already using that scheme; a new one is proposed only
/// if it is large enough and beats every existing trickle group by
/// min_new_rgroup_savings. nullopt when nothing qualifies.
std::optional<TargetChoice> plan_target(const PlanRequest& request, const SchemeTable& table,
                                        const TransitionPolicy& tp, const IoPolicy& io,
                                        const std::vector<const Rgroup*>& existing);

/// Plans the purge of an undersized group (inbound counts pending joiners).
/// Trickle groups go to the lowest-overhead existing group with more
/// redundancy, step groups go to `rgroup0`.
std::optional<TransitionPlan> purge_check(const Rgroup& rgroup, std::int64_t inbound, const Rgroup& rgroup0,
                                          const std::vector<const Rgroup*>& existing, double capacity,
                                          const TransitionPolicy& tp, Date today, int plan_id);

/// Builds the single RDn of `disks` from rgroup `from` into `choice`; nullopt
/// when no disk qualifies.
std::optional<TransitionPlan> schedule_rdn(const std::vector<std::int32_t>& disks, const Rgroup& from, int to_rgroup,
                            const TargetChoice& choice, Mechanism mechanism, double capacity, Date today,
                            int plan_id);

}  // namespace diskadapt

#include "diskadapt/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diskadapt {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kEmpty: return "EMPTY";
    case Mechanism::kBulkParity: return "BULK_PARITY";
    case Mechanism::kReencode: return "REENCODE";
  }
  return "?";
}

std::string_view to_string(Urgency u) {
  switch (u) {
    case Urgency::kProactive: return "PROACTIVE";
    case Urgency::kPurge: return "PURGE";
    case Urgency::kEmergency: return "EMERGENCY";
  }
  return "?";
}

std::string_view to_string(RgroupKind k) {
  switch (k) {
    case RgroupKind::kDefault: return "DEFAULT";
    case RgroupKind::kTrickleShared: return "TRICKLE_SHARED";
    case RgroupKind::kStepDedicated: return "STEP_DEDICATED";
  }
  return "?";
}

void IoPolicy::validate() const {
  if (!(peak_io_cap > 0 && peak_io_cap <= 1)) throw std::invalid_argument("peak_io_cap must be in (0, 1]");
  if (!(avg_io > 0)) throw std::invalid_argument("avg_io must be > 0");
  if (avg_io > peak_io_cap) throw std::invalid_argument("avg_io must not exceed peak_io_cap");
  if (!(per_disk_bandwidth > 0)) throw std::invalid_argument("per_disk_bandwidth must be > 0");
}

void TransitionPolicy::validate() const {
  if (canary_count <= 0) throw std::invalid_argument("canary_count must be > 0");
  if (!(threshold_fraction > 0 && threshold_fraction < 1)) {
    throw std::invalid_argument("threshold_fraction must be in (0, 1)");
  }
  if (!(phase_tolerance > 1)) throw std::invalid_argument("phase_tolerance must be > 1");
  if (max_phases < 1) throw std::invalid_argument("max_phases must be >= 1");
  if (min_rgroup_size < 1) throw std::invalid_argument("min_rgroup_size must be >= 1");
  if (min_new_rgroup_savings < 0) throw std::invalid_argument("min_new_rgroup_savings must be >= 0");
  if (projection_window < 2) throw std::invalid_argument("projection_window must be >= 2");
  if (step_window_days < 1 || step_window_days > 7) throw std::invalid_argument("step_window_days must be in [1, 7]");
  if (!(fill_fraction >= 0 && fill_fraction < max_fill && max_fill <= 1)) {
    throw std::invalid_argument("need 0 <= fill_fraction < max_fill <= 1");
  }
}

std::int64_t empty_capacity(std::int64_t rgroup_size, double fill_fraction, double max_fill) {
  if (rgroup_size <= 0) return 0;
  // Moving m disks' data onto the other size - m members keeps them at
  // size * fill / (size - m) <= max_fill.
  const double m = std::floor(static_cast<double>(rgroup_size) * (1.0 - fill_fraction / max_fill) + 1e-9);
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(m), 0, rgroup_size - 1);
}

IoCost transition_cost(Mechanism mechanism, const Scheme& cur, const Scheme& next, std::int64_t disks,
                       double capacity, std::int64_t rgroup_size, double fill_fraction, double max_fill) {
  cur.validate();
  next.validate();
  if (disks < 0) throw std::invalid_argument("transition_cost: negative disk count");
  if (!(capacity > 0)) throw std::invalid_argument("transition_cost: capacity must be > 0");
  const double d = static_cast<double>(disks);
  switch (mechanism) {
    case Mechanism::kEmpty: {
      if (disks > empty_capacity(rgroup_size, fill_fraction, max_fill)) {
        throw std::invalid_argument("EMPTY needs free space for " + std::to_string(disks) + " disks in a group of " +
                                    std::to_string(rgroup_size));
      }
      return {d * capacity, d * capacity};
    }
    case Mechanism::kBulkParity: {
      if (disks != rgroup_size) throw std::invalid_argument("BULK_PARITY requires the entire Rgroup");
      const double data = static_cast<double>(cur.k) / cur.n * capacity;
      // Parity is derived from the per-disk total so read + write rounds to it.
      const double total = (1.0 + static_cast<double>(next.f()) / next.k) * (static_cast<double>(cur.k) / cur.n) * capacity;
      return {d * data, d * (total - data)};
    }
    case Mechanism::kReencode: {
      const double read = cur.k * capacity;
      const double write = read * next.n / next.k;
      return {d * read, d * write};
    }
  }
  throw std::invalid_argument("unknown mechanism");
}

bool mechanism_feasible(Mechanism m, const MechanismContext& ctx) {
  switch (m) {
    case Mechanism::kEmpty:
      return ctx.disks < ctx.rgroup_size && ctx.disks <= empty_capacity(ctx.rgroup_size, ctx.fill_fraction, ctx.max_fill);
    case Mechanism::kBulkParity: return ctx.disks == ctx.rgroup_size;
    case Mechanism::kReencode: return true;
  }
  return false;
}

Mechanism pick_mechanism(const MechanismContext& ctx) {
  Mechanism best = Mechanism::kReencode;
  double best_total = kNever;
  for (Mechanism m : {Mechanism::kEmpty, Mechanism::kBulkParity, Mechanism::kReencode}) {
    if (!mechanism_feasible(m, ctx)) continue;
    const double t = transition_cost(m, ctx.cur, ctx.next, ctx.disks, ctx.capacity, ctx.rgroup_size,
                                     ctx.fill_fraction, ctx.max_fill)
                         .total();
    if (t < best_total) {
      best_total = t;
      best = m;
    }
  }
  return best;
}

std::int32_t paced_days(double bytes, double bandwidth_per_day, double fraction) {
  if (bytes <= 0) return 0;
  const double per_day = bandwidth_per_day * fraction;
  if (!(per_day > 0)) throw std::invalid_argument("paced_days: no bandwidth");
  return static_cast<std::int32_t>(std::ceil(bytes / per_day - 1e-9));
}

double worth_min_residency(double per_disk_bytes, std::int32_t duration_days, const IoPolicy& io) {
  return per_disk_bytes / io.disk_daily_bytes() / io.avg_io - duration_days;
}

double first_crossing_age(const HazardCurve& curve, double limit, std::int32_t from_age) {
  if (!curve.has_support()) return kNever;
  const std::int32_t begin = std::max(from_age, curve.support_begin());
  for (std::int32_t a = begin; a <= curve.support_end(); ++a) {
    if (curve.afr_at(a) > limit) return a;
  }
  if (curve.afr_at(curve.support_end()) > limit) return std::max(from_age, curve.support_end() + 1);
  return kNever;
}

std::optional<Date> rup_date_trickle(Date deploy, const HazardCurve& known_curve, const Scheme& scheme,
                                     const SchemeTable& table, std::int32_t from_age,
                                     std::int32_t transition_days) {
  const double crossing = first_crossing_age(known_curve, table.ceiling(scheme), from_age);
  if (crossing == kNever) return std::nullopt;
  return deploy + (static_cast<std::int32_t>(crossing) - transition_days);
}

std::optional<AfrProjection> live_projection(const HazardCurve& curve, const TransitionPolicy& tp,
                                             std::int32_t min_age) {
  if (!curve.has_support()) return std::nullopt;
  const std::int32_t from = std::max(min_age, curve.support_begin());
  const std::int32_t window = std::min(tp.projection_window, curve.support_end() - from + 1);
  if (window < std::max(2, tp.projection_window / 2)) return std::nullopt;
  return project_afr(curve, window);
}

double live_afr(const AfrProjection& p, std::int32_t age) { return std::max(p.current_afr, p.at(age)); }

std::optional<StepTrigger> rup_check_step(Rgroup& rgroup, double observed_afr, Date today, const SchemeTable& table,
                                          const TransitionPolicy& tp) {
  if (rgroup.fired.count(rgroup.scheme)) return std::nullopt;
  const double threshold = tp.threshold_fraction * table.ceiling(rgroup.scheme);
  if (observed_afr < threshold) return std::nullopt;
  rgroup.fired.insert(rgroup.scheme);
  return StepTrigger{today, observed_afr, threshold};
}

std::optional<TargetChoice> plan_target(const PlanRequest& request, const SchemeTable& table,
                                        const TransitionPolicy& tp, const IoPolicy& io,
                                        const std::vector<const Rgroup*>& existing) {
  if (request.disks <= 0) return std::nullopt;
  const double afr = std::max(request.afr_now, 1e-6);
  std::vector<TargetChoice> passing;
  for (const Scheme& s : table.candidates()) {
    const bool lower = s.overhead() < request.current.overhead();
    const bool higher = s.overhead() > request.current.overhead();
    if (request.rdn ? !lower : !higher) continue;
    if (!table.viable(s, afr)) continue;
    const auto [cost, duration] = request.cost(s);
    const double residency = request.residency(s, duration);
    const double need = worth_min_residency(cost.total() / static_cast<double>(request.disks), duration, io);
    if (residency <= 0 || residency < need) continue;
    passing.push_back({s, -1, residency, cost, duration});
  }
  std::stable_sort(passing.begin(), passing.end(), [](const TargetChoice& a, const TargetChoice& b) {
    if (a.scheme.overhead() != b.scheme.overhead()) return a.scheme.overhead() < b.scheme.overhead();
    return a.scheme.k < b.scheme.k;
  });
  if (passing.empty()) return std::nullopt;
  if (!request.trickle) return passing.front();

  auto group_for = [&](const Scheme& s) -> const Rgroup* {
    for (const Rgroup* g : existing) {
      if (!g->retired && g->kind == RgroupKind::kTrickleShared && g->scheme == s) return g;
    }
    return nullptr;
  };
  double best_existing = kNever;
  for (const TargetChoice& c : passing) {
    if (group_for(c.scheme)) best_existing = std::min(best_existing, c.scheme.overhead());
  }
  for (TargetChoice c : passing) {
    if (const Rgroup* g = group_for(c.scheme)) {
      c.rgroup = g->id;
      return c;
    }
    const bool big_enough = request.disks >= tp.min_rgroup_size;
    const bool beats = best_existing == kNever || c.scheme.overhead() <= best_existing - tp.min_new_rgroup_savings;
    if (big_enough && beats) return c;
  }
  return std::nullopt;
}

std::optional<TransitionPlan> purge_check(const Rgroup& rgroup, std::int64_t inbound, const Rgroup& rgroup0,
                                          const std::vector<const Rgroup*>& existing, double capacity,
                                          const TransitionPolicy& tp, Date today, int plan_id) {
  if (rgroup.kind == RgroupKind::kDefault || rgroup.retired || rgroup.members.empty()) return std::nullopt;
  if (rgroup.size() + inbound >= tp.min_rgroup_size) return std::nullopt;

  const Rgroup* target = &rgroup0;
  if (rgroup.kind == RgroupKind::kTrickleShared) {
    const Rgroup* best = nullptr;
    for (const Rgroup* g : existing) {
      if (g->retired || g->id == rgroup.id || g->kind == RgroupKind::kStepDedicated) continue;
      if (g->kind == RgroupKind::kTrickleShared && g->size() < tp.min_rgroup_size) continue;
      if (g->scheme.overhead() <= rgroup.scheme.overhead()) continue;
      if (!best || g->scheme.overhead() < best->scheme.overhead()) best = g;
    }
    if (best) target = best;
  }

  TransitionPlan plan;
  plan.id = plan_id;
  plan.disks.assign(rgroup.members.begin(), rgroup.members.end());
  plan.from_rgroup = rgroup.id;
  plan.to_rgroup = target->id;
  plan.from_scheme = rgroup.scheme;
  plan.to_scheme = target->scheme;
  plan.mechanism = Mechanism::kBulkParity;
  const IoCost cost = transition_cost(Mechanism::kBulkParity, rgroup.scheme, target->scheme, rgroup.size(), capacity,
                                      rgroup.size());
  plan.total_read_bytes = cost.read;
  plan.total_write_bytes = cost.write;
  plan.reencode_bytes = transition_cost(Mechanism::kReencode, rgroup.scheme, target->scheme, rgroup.size(), capacity,
                                        rgroup.size())
                            .total();
  plan.earliest_start = today;
  plan.urgency = Urgency::kPurge;
  plan.whole_group = true;
  return plan;
}

std::optional<TransitionPlan> schedule_rdn(const std::vector<std::int32_t>& disks, const Rgroup& from, int to_rgroup,
                                           const TargetChoice& choice, Mechanism mechanism, double capacity,
                                           Date today, int plan_id) {
  if (disks.empty()) return std::nullopt;
  TransitionPlan plan;
  plan.id = plan_id;
  plan.disks = disks;
  plan.from_rgroup = from.id;
  plan.to_rgroup = to_rgroup;
  plan.from_scheme = from.scheme;
  plan.to_scheme = choice.scheme;
  plan.mechanism = mechanism;
  const auto n = static_cast<std::int64_t>(disks.size());
  const IoCost cost = transition_cost(mechanism, from.scheme, choice.scheme, n, capacity, from.size());
  plan.total_read_bytes = cost.read;
  plan.total_write_bytes = cost.write;
  plan.reencode_bytes = transition_cost(Mechanism::kReencode, from.scheme, choice.scheme, n, capacity, from.size()).total();
  plan.earliest_start = today;
  plan.urgency = Urgency::kProactive;
  plan.whole_group = mechanism == Mechanism::kBulkParity;
  return plan;
}

}  // namespace diskadapt

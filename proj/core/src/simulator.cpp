#include "diskadapt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "diskadapt/learner.hpp"

namespace diskadapt {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::kPacemaker: return "PACEMAKER";
    case PolicyKind::kReactive: return "REACTIVE";
    case PolicyKind::kIdeal: return "IDEAL";
    case PolicyKind::kStatic: return "STATIC";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view text) {
  std::string up(text);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "PACEMAKER") return PolicyKind::kPacemaker;
  if (up == "REACTIVE") return PolicyKind::kReactive;
  if (up == "IDEAL") return PolicyKind::kIdeal;
  if (up == "STATIC") return PolicyKind::kStatic;
  throw std::invalid_argument("unknown policy '" + std::string(text) + "'");
}

void SimConfig::validate() const {
  reliability.validate();
  io.validate();
  transition.validate();
  kernel.validate();
  if (candidates.empty()) throw std::invalid_argument("scheme grid is empty");
  for (const Scheme& s : candidates) s.validate();
  for (const auto& [dg, p] : truth) p.validate();
  if (infancy.stability_days < 1) throw std::invalid_argument("infancy stability_days must be >= 1");
}

double space_savings(const std::vector<CapacityShare>& disks, const Scheme& scheme0) {
  if (disks.empty()) throw std::invalid_argument("space_savings: empty cluster");
  double logical_static = 0.0;
  double logical_adaptive = 0.0;
  for (const CapacityShare& d : disks) {
    logical_static += d.capacity * scheme0.k / scheme0.n;
    logical_adaptive += d.capacity * d.scheme.k / d.scheme.n;
  }
  return 1.0 - logical_static / logical_adaptive;
}

IoCost reconstruction_io(const std::vector<CapacityShare>& failed) {
  IoCost c;
  for (const CapacityShare& d : failed) {
    c.read += d.scheme.k * d.capacity;
    c.write += d.capacity;
  }
  return c;
}

namespace {

struct Disk {
  std::string id;
  int dgroup = 0;
  Date deploy;
  Date end;  // exclusive end of observed life
  double capacity = 0.0;
  std::optional<std::string> batch;
  bool alive = false;
  bool trickle = true;
  bool canary = false;
  bool rdn_done = false;
  int rgroup = 0;
  int plan = -1;
  double bytes = 0.0;
  double planned_end_age = 0.0;
};

struct Batch {
  Date first;
  Date last;
  int rgroup = 0;
  int dgroup = 0;
  bool closed = false;
  bool step = false;
};

struct DgroupState {
  std::string name;
  std::int64_t canaries = 0;
  std::optional<Date> youngest_canary;
  std::vector<double> truth;  // by age
  // IDEAL cache: best scheme and its tolerated AFR per age.
  std::vector<std::optional<std::pair<Scheme, double>>> ideal;
};

class Simulation {
public:
  Simulation(const ClusterTrace& trace, PolicyKind policy, const SimConfig& config)
      : trace_(trace), policy_(policy), cfg_(config), table_(config.reliability, config.candidates) {}

  RunResult run();

private:
  bool learning() const { return policy_ != PolicyKind::kStatic; }
  bool adaptive() const { return policy_ == PolicyKind::kPacemaker || policy_ == PolicyKind::kReactive; }
  const ReliabilityConfig& rc() const { return cfg_.reliability; }
  const TransitionPolicy& tp() const { return cfg_.transition; }
  const IoPolicy& io() const { return cfg_.io; }
  double daily() const { return io().disk_daily_bytes(); }
  std::int32_t age(const Disk& d, Date day) const { return day - d.deploy; }

  void index();
  void build_truth();
  int new_rgroup(RgroupKind kind, const Scheme& scheme, std::optional<std::string> batch, Date today);
  void move_disk(std::int32_t idx, int to);
  void drop_from_plan(std::int32_t idx);
  void apply_events(Date day, std::vector<std::int32_t>& failed);
  void learn(Date day, const std::vector<std::int32_t>& failed);
  void close_batches(Date day);
  void decide(Date day);
  void decide_step(Date day, int gid);
  void decide_trickle_rdn(Date day);
  void decide_trickle_rup(Date day, int gid);
  void decide_purges(Date day);
  void submit(TransitionPlan plan, int charged, bool reliability_rup, double planned_end_days, Date day);
  void execute(Date day, DailyReport& rep);
  void complete(int plan_id, Date day);
  void account(Date day, DailyReport& rep);
  void audit_partition();
  void finish(RunResult& out);

  double crossing(int dg, double limit);
  double group_capacity(const Rgroup& g) const;
  std::vector<const Rgroup*> groups() const;
  Scheme upgrade_fallback(const Scheme& cur, double afr) const;
  const std::pair<Scheme, double>& ideal_for(int dg, std::int32_t a);
  double truth_at(int dg, std::int32_t a) const;
  bool busy(int gid) const { return busy_.count(gid) > 0; }
  std::int64_t inbound(int gid) const;

  const ClusterTrace& trace_;
  PolicyKind policy_;
  SimConfig cfg_;
  SchemeTable table_;

  std::vector<Disk> disks_;
  std::unordered_map<std::string, std::int32_t> disk_index_;
  std::vector<DgroupState> dgroups_;
  std::unordered_map<std::string, int> dgroup_index_;
  std::vector<DgroupLearner> learners_;
  std::map<std::string, Batch> batches_;
  std::deque<Rgroup> rgroups_;
  std::vector<RgroupRecord> rgroup_records_;
  std::vector<PlanRecord> plans_;
  std::map<int, int> plan_charged_;
  std::map<int, int> busy_;  // whole-group plan per source rgroup
  RateLimiter limiter_;
  std::map<std::int32_t, double> recon_;
  std::map<std::pair<int, long long>, double> crossing_cache_;
  std::int64_t live_ = 0;
  AuditReport audit_;
  std::size_t next_event_ = 0;
};

void Simulation::index() {
  for (const DiskEvent& e : trace_.events) {
    if (!dgroup_index_.count(e.dgroup)) {
      dgroup_index_[e.dgroup] = static_cast<int>(dgroups_.size());
      dgroups_.push_back({e.dgroup, 0, std::nullopt, {}, {}});
      learners_.emplace_back(e.dgroup, cfg_.kernel, cfg_.support, cfg_.infancy);
    }
    if (e.kind == EventKind::kDeploy) {
      const auto idx = static_cast<std::int32_t>(disks_.size());
      disk_index_[e.disk_id] = idx;
      Disk d;
      d.id = e.disk_id;
      d.dgroup = dgroup_index_[e.dgroup];
      d.deploy = e.date;
      d.end = trace_.end_date + 1;
      d.capacity = static_cast<double>(e.capacity.value_or(0));
      if (!e.batch_tag.empty()) d.batch = e.batch_tag;
      disks_.push_back(std::move(d));
    }
  }
}

void Simulation::build_truth() {
  const std::int32_t horizon = trace_.end_date - trace_.start_date + 2;
  for (std::size_t g = 0; g < dgroups_.size(); ++g) {
    DgroupState& st = dgroups_[g];
    st.truth.resize(static_cast<std::size_t>(horizon));
    st.ideal.resize(static_cast<std::size_t>(horizon));
    if (const auto it = cfg_.truth.find(st.name); it != cfg_.truth.end()) {
      for (std::int32_t a = 0; a < horizon; ++a) st.truth[static_cast<std::size_t>(a)] = it->second.afr_at(a);
      continue;
    }
    // Hindsight estimate from the whole trace.
    const ExposureTable t = exposure_table(trace_, st.name, trace_.end_date + 1);
    const HazardCurve c = smoothed_hazard(t, cfg_.kernel, cfg_.support);
    for (std::int32_t a = 0; a < horizon; ++a) {
      st.truth[static_cast<std::size_t>(a)] =
          c.has_support() ? c.afr_at(std::clamp(a, c.support_begin(), c.support_end())) : 0.0;
    }
  }
}

double Simulation::truth_at(int dg, std::int32_t a) const {
  const auto& t = dgroups_[static_cast<std::size_t>(dg)].truth;
  return t[static_cast<std::size_t>(std::clamp<std::int32_t>(a, 0, static_cast<std::int32_t>(t.size()) - 1))];
}

const std::pair<Scheme, double>& Simulation::ideal_for(int dg, std::int32_t a) {
  auto& slot = dgroups_[static_cast<std::size_t>(dg)].ideal[static_cast<std::size_t>(a)];
  if (!slot) {
    const Scheme s = table_.best_at(truth_at(dg, a));
    slot = std::make_pair(s, table_.tolerated(s));
  }
  return *slot;
}

int Simulation::new_rgroup(RgroupKind kind, const Scheme& scheme, std::optional<std::string> batch, Date today) {
  Rgroup g;
  g.id = static_cast<int>(rgroups_.size());
  g.kind = kind;
  g.scheme = scheme;
  g.origin_batch = batch;
  rgroups_.push_back(g);
  RgroupRecord r;
  r.id = g.id;
  r.kind = kind;
  r.origin_batch = std::move(batch);
  r.created = today;
  r.schemes.emplace_back(today, scheme);
  rgroup_records_.push_back(std::move(r));
  return g.id;
}

void Simulation::move_disk(std::int32_t idx, int to) {
  Disk& d = disks_[static_cast<std::size_t>(idx)];
  if (d.canary && to != 0) {
    ++audit_.canary_moves;
    if (audit_.messages.size() < 20) audit_.messages.push_back("canary " + d.id + " moved out of Rgroup0");
  }
  rgroups_[static_cast<std::size_t>(d.rgroup)].members.erase(idx);
  rgroups_[static_cast<std::size_t>(to)].members.insert(idx);
  d.rgroup = to;
}

void Simulation::drop_from_plan(std::int32_t idx) {
  Disk& d = disks_[static_cast<std::size_t>(idx)];
  if (d.plan < 0) return;
  auto& v = plans_[static_cast<std::size_t>(d.plan)].plan.disks;
  v.erase(std::remove(v.begin(), v.end(), idx), v.end());
  d.plan = -1;
}

std::vector<const Rgroup*> Simulation::groups() const {
  std::vector<const Rgroup*> out;
  for (const Rgroup& g : rgroups_) {
    if (!g.retired) out.push_back(&g);
  }
  return out;
}

double Simulation::group_capacity(const Rgroup& g) const {
  if (g.members.empty()) return 4e12;
  double sum = 0.0;
  for (std::int32_t idx : g.members) sum += disks_[static_cast<std::size_t>(idx)].capacity;
  return sum / static_cast<double>(g.members.size());
}

std::int64_t Simulation::inbound(int gid) const {
  std::int64_t n = 0;
  for (const auto& [pid, charged] : plan_charged_) {
    const TransitionPlan& p = plans_[static_cast<std::size_t>(pid)].plan;
    if (p.to_rgroup == gid && p.from_rgroup != gid) n += static_cast<std::int64_t>(p.disks.size());
  }
  return n;
}

double Simulation::crossing(int dg, double limit) {
  const auto key = std::make_pair(dg, std::llround(limit * 1e9));
  if (const auto it = crossing_cache_.find(key); it != crossing_cache_.end()) return it->second;
  const DgroupLearner& L = learners_[static_cast<std::size_t>(dg)];
  const double c = first_crossing_age(L.curve(), limit, L.infancy_end().value_or(0));
  crossing_cache_[key] = c;
  return c;
}

Scheme Simulation::upgrade_fallback(const Scheme& cur, double afr) const {
  const Scheme* best = nullptr;
  for (const Scheme& s : table_.candidates()) {
    if (s.overhead() <= cur.overhead() || !table_.viable(s, std::max(afr, 1e-6))) continue;
    if (tp().threshold_fraction * table_.ceiling(s) <= afr) continue;
    if (!best || s.overhead() < best->overhead()) best = &s;
  }
  return best ? *best : rc().scheme0;
}

void Simulation::apply_events(Date day, std::vector<std::int32_t>& failed) {
  while (next_event_ < trace_.events.size() && trace_.events[next_event_].date == day) {
    const DiskEvent& e = trace_.events[next_event_++];
    const std::int32_t idx = disk_index_.at(e.disk_id);
    Disk& d = disks_[static_cast<std::size_t>(idx)];
    DgroupState& st = dgroups_[static_cast<std::size_t>(d.dgroup)];
    switch (e.kind) {
      case EventKind::kDeploy: {
        d.alive = true;
        ++live_;
        int target = 0;
        if (d.batch) {
          auto it = batches_.find(*d.batch);
          if (it == batches_.end()) {
            Batch b;
            b.first = day;
            b.last = day;
            b.dgroup = d.dgroup;
            b.rgroup = new_rgroup(RgroupKind::kStepDedicated, rc().scheme0, d.batch, day);
            it = batches_.emplace(*d.batch, b).first;
          }
          Batch& b = it->second;
          if (!b.closed && day - b.first < tp().step_window_days) {
            b.last = day;
            target = b.rgroup;
            d.trickle = false;
          }
        }
        if (d.trickle && st.canaries < tp().canary_count) {
          d.canary = true;
          ++st.canaries;
          st.youngest_canary = day;
        }
        d.rgroup = target;
        rgroups_[static_cast<std::size_t>(target)].members.insert(idx);
        if (learning()) learners_[static_cast<std::size_t>(d.dgroup)].add_disk(d.deploy);
        break;
      }
      case EventKind::kFail:
      case EventKind::kDecommission: {
        if (!d.alive) break;
        d.alive = false;
        --live_;
        rgroups_[static_cast<std::size_t>(d.rgroup)].members.erase(idx);
        drop_from_plan(idx);
        if (e.kind == EventKind::kFail) {
          d.end = day + 1;
          failed.push_back(idx);
          if (learning()) learners_[static_cast<std::size_t>(d.dgroup)].record_failure(age(d, day));
          // Rebuild IO under the scheme protecting the disk today.
          const Scheme s = rgroups_[static_cast<std::size_t>(d.rgroup)].scheme;
          const Scheme eff = policy_ == PolicyKind::kIdeal && !d.canary ? ideal_for(d.dgroup, age(d, day)).first : s;
          const auto days = std::max<std::int32_t>(1, static_cast<std::int32_t>(std::ceil(rc().mttr_days)));
          const double bytes = (eff.k + 1) * d.capacity / days;
          for (std::int32_t i = 0; i < days; ++i) recon_[day.days() + i] += bytes;
        } else {
          d.end = day;
          if (learning()) learners_[static_cast<std::size_t>(d.dgroup)].remove_disk(d.deploy);
        }
        break;
      }
    }
  }
}

void Simulation::learn(Date day, const std::vector<std::int32_t>& failed) {
  if (!learning()) return;
  for (DgroupLearner& L : learners_) L.advance(day);
  for (std::int32_t idx : failed) {
    learners_[static_cast<std::size_t>(disks_[static_cast<std::size_t>(idx)].dgroup)].remove_disk(
        disks_[static_cast<std::size_t>(idx)].deploy);
  }
  for (std::size_t g = 0; g < learners_.size(); ++g) {
    const DgroupState& st = dgroups_[g];
    // Trickle curves are trusted only up to the youngest canary's age.
    const std::int32_t cap = st.youngest_canary ? day - *st.youngest_canary : -1;
    learners_[g].refresh(cap);
  }
  crossing_cache_.clear();
}

void Simulation::close_batches(Date day) {
  for (auto& [tag, b] : batches_) {
    if (b.closed || day - b.first < tp().step_window_days) continue;
    b.closed = true;
    Rgroup& g = rgroups_[static_cast<std::size_t>(b.rgroup)];
    if (g.size() >= tp().min_rgroup_size) {
      b.step = true;
      continue;
    }
    // Too small to stand alone: same scheme as Rgroup0, so merging is free.
    const std::vector<std::int32_t> members(g.members.begin(), g.members.end());
    for (std::int32_t idx : members) {
      disks_[static_cast<std::size_t>(idx)].trickle = true;
      move_disk(idx, 0);
    }
    g.retired = true;
    rgroup_records_[static_cast<std::size_t>(g.id)].retired = day;
  }
}

void Simulation::submit(TransitionPlan plan, int charged, bool reliability_rup, double planned_end_days, Date day) {
  plan.id = static_cast<int>(plans_.size());
  const bool rdn = plan.is_rdn();
  for (std::int32_t idx : plan.disks) {
    Disk& d = disks_[static_cast<std::size_t>(idx)];
    if (d.canary) {
      ++audit_.canary_moves;
      if (audit_.messages.size() < 20) audit_.messages.push_back("canary " + d.id + " scheduled for transition");
    }
    if (rdn && d.rdn_done) {
      ++audit_.double_rdn;
      if (audit_.messages.size() < 20) audit_.messages.push_back("second RDn for " + d.id);
    }
    d.plan = plan.id;
    d.planned_end_age = std::max(d.planned_end_age, age(d, day) + planned_end_days);
  }
  if (plan.whole_group) busy_[plan.from_rgroup] = plan.id;
  limiter_.submit(plan, charged);
  plan_charged_[plan.id] = charged;
  PlanRecord rec;
  rec.start = day;
  rec.reliability_rup = reliability_rup;
  rec.plan = std::move(plan);
  plans_.push_back(std::move(rec));
}

void Simulation::decide(Date day) {
  if (!adaptive()) return;
  decide_purges(day);
  for (std::size_t gid = 0; gid < rgroups_.size(); ++gid) {
    const Rgroup& g = rgroups_[gid];
    if (g.retired || g.members.empty() || busy(static_cast<int>(gid))) continue;
    if (g.kind == RgroupKind::kStepDedicated) {
      if (!g.origin_batch || !batches_.at(*g.origin_batch).step) continue;
      decide_step(day, static_cast<int>(gid));
    } else if (g.kind == RgroupKind::kTrickleShared) {
      decide_trickle_rup(day, static_cast<int>(gid));
    }
  }
  decide_trickle_rdn(day);
}

void Simulation::decide_purges(Date day) {
  const auto existing = groups();
  for (std::size_t gid = 1; gid < rgroups_.size(); ++gid) {
    const Rgroup& g = rgroups_[gid];
    if (g.retired || busy(g.id)) continue;
    if (g.kind == RgroupKind::kStepDedicated && (!g.origin_batch || !batches_.at(*g.origin_batch).closed)) continue;
    bool locked = false;
    for (std::int32_t idx : g.members) locked = locked || disks_[static_cast<std::size_t>(idx)].plan >= 0;
    if (locked) continue;
    auto plan = purge_check(g, inbound(g.id), rgroups_[0], existing, group_capacity(g), tp(), day, 0);
    if (!plan) continue;
    const bool terminal = plan->to_scheme == rc().scheme0;
    submit(std::move(*plan), g.id, false, terminal ? kNever : 0.0, day);
  }
}

void Simulation::decide_step(Date day, int gid) {
  Rgroup& g = rgroups_[static_cast<std::size_t>(gid)];
  const Batch& b = batches_.at(*g.origin_batch);
  const DgroupLearner& L = learners_[static_cast<std::size_t>(b.dgroup)];
  const auto inf = L.infancy_end();
  if (!inf) return;
  const auto proj = live_projection(L.curve(), tp(), *inf);
  if (!proj) return;
  const std::int32_t cur_age = day - b.first;
  const double live = live_afr(*proj, cur_age);
  const auto size = g.size();
  const double cap = group_capacity(g);
  const double bw = static_cast<double>(size) * daily();

  auto residency = [&](const Scheme& s, std::int32_t completion) {
    const double thr = tp().threshold_fraction * table_.ceiling(s);
    const double a = live_afr(*proj, cur_age + completion);
    if (a >= thr) return 0.0;
    if (proj->slope <= 0) return kNever;
    return (thr - a) / proj->slope;
  };
  auto bulk = [&](const Scheme& s) {
    const Mechanism m = policy_ == PolicyKind::kReactive && s.overhead() > g.scheme.overhead()
                            ? Mechanism::kReencode
                            : Mechanism::kBulkParity;
    const IoCost c = transition_cost(m, g.scheme, s, size, cap, size);
    return std::make_pair(c, paced_days(c.total(), bw, io().peak_io_cap));
  };
  auto make_plan = [&](const Scheme& to, Mechanism m) {
    TransitionPlan p;
    p.disks.assign(g.members.begin(), g.members.end());
    p.from_rgroup = p.to_rgroup = gid;
    p.from_scheme = g.scheme;
    p.to_scheme = to;
    p.mechanism = m;
    const IoCost c = transition_cost(m, g.scheme, to, size, cap, size);
    p.total_read_bytes = c.read;
    p.total_write_bytes = c.write;
    p.reencode_bytes = transition_cost(Mechanism::kReencode, g.scheme, to, size, cap, size).total();
    p.earliest_start = day;
    p.whole_group = true;
    return p;
  };

  const bool rdn_pending = g.scheme == rc().scheme0 && std::none_of(g.members.begin(), g.members.end(), [&](std::int32_t i) {
                             return disks_[static_cast<std::size_t>(i)].rdn_done;
                           });
  if (rdn_pending) {
    if (day - b.last < *inf) return;
    PlanRequest req;
    req.disks = size;
    req.capacity = cap;
    req.current = g.scheme;
    req.afr_now = live;
    req.rdn = true;
    req.residency = residency;
    req.cost = bulk;
    const auto choice = plan_target(req, table_, tp(), io(), groups());
    if (!choice) return;
    auto plan = schedule_rdn(std::vector<std::int32_t>(g.members.begin(), g.members.end()), g, gid, *choice,
                             Mechanism::kBulkParity, cap, day, 0);
    submit(std::move(*plan), gid, false, choice->duration_days + choice->residency_days, day);
    return;
  }

  if (policy_ == PolicyKind::kReactive) {
    // Reacts to the observed estimate only, without projecting forward.
    const double observed = L.afr_at(cur_age).value_or(0.0);
    if (g.fired.count(g.scheme) || observed < table_.tolerated(g.scheme)) return;
    g.fired.insert(g.scheme);
    Scheme to = table_.best_at(observed);
    if (to.overhead() <= g.scheme.overhead()) to = upgrade_fallback(g.scheme, observed);
    if (to == g.scheme) return;
    TransitionPlan p = make_plan(to, Mechanism::kReencode);
    p.urgency = Urgency::kEmergency;
    p.uncapped = true;
    p.deadline = day;
    submit(std::move(p), gid, true, kNever, day);
    return;
  }

  // The trigger fires on the observed smoothed AFR; the projection only
  // sizes the target and the deadline.
  const auto trig = rup_check_step(g, L.afr_at(cur_age).value_or(0.0), day, table_, tp());
  if (!trig) return;
  PlanRequest req;
  req.disks = size;
  req.capacity = cap;
  req.current = g.scheme;
  req.afr_now = live;
  req.rdn = false;
  req.residency = residency;
  req.cost = bulk;
  const auto choice = plan_target(req, table_, tp(), io(), groups());
  Scheme to = choice ? choice->scheme : upgrade_fallback(g.scheme, live_afr(*proj, cur_age + tp().projection_window));
  if (to == g.scheme) return;
  TransitionPlan p = make_plan(to, Mechanism::kBulkParity);
  const std::int32_t duration = paced_days(p.total_bytes(), bw, io().peak_io_cap);
  const double tol = table_.tolerated(g.scheme);
  std::optional<Date> cross;
  if (live >= tol) {
    cross = day;
  } else if (proj->slope > 0) {
    cross = day + static_cast<std::int32_t>(std::floor((tol - live) / proj->slope));
  }
  if (cross && day + duration > *cross) {
    p.urgency = Urgency::kEmergency;
    p.deadline = std::max(day, *cross);
  }
  const double end_days = choice ? choice->duration_days + choice->residency_days : kNever;
  submit(std::move(p), gid, true, end_days, day);
}

void Simulation::decide_trickle_rdn(Date day) {
  Rgroup& g0 = rgroups_[0];
  std::int64_t locked_out = 0;
  for (std::int32_t idx : g0.members) locked_out += disks_[static_cast<std::size_t>(idx)].plan >= 0 ? 1 : 0;
  std::map<int, std::vector<std::int32_t>> eligible;
  for (std::int32_t idx : g0.members) {
    const Disk& d = disks_[static_cast<std::size_t>(idx)];
    if (!d.trickle || d.canary || d.rdn_done || d.plan >= 0) continue;
    const auto inf = learners_[static_cast<std::size_t>(d.dgroup)].infancy_end();
    if (!inf || age(d, day) < *inf) continue;
    eligible[d.dgroup].push_back(idx);
  }
  for (auto& [dg, list] : eligible) {
    std::stable_sort(list.begin(), list.end(), [&](std::int32_t a, std::int32_t b) {
      return disks_[static_cast<std::size_t>(a)].deploy < disks_[static_cast<std::size_t>(b)].deploy;
    });
    const std::int64_t room = empty_capacity(g0.size(), tp().fill_fraction, tp().max_fill) - locked_out;
    if (room <= 0) return;
    if (static_cast<std::int64_t>(list.size()) > room) list.resize(static_cast<std::size_t>(room));
    const auto m = static_cast<std::int64_t>(list.size());
    const Disk& oldest = disks_[static_cast<std::size_t>(list.front())];
    const std::int32_t oldest_age = age(oldest, day);
    const DgroupLearner& L = learners_[static_cast<std::size_t>(dg)];
    double cap = 0.0;
    for (std::int32_t idx : list) cap += disks_[static_cast<std::size_t>(idx)].capacity;
    cap /= static_cast<double>(m);
    const double bw = static_cast<double>(g0.size()) * daily();

    PlanRequest req;
    req.disks = m;
    req.capacity = cap;
    req.current = g0.scheme;
    req.afr_now = L.afr_at(oldest_age).value_or(0.0);
    req.rdn = true;
    req.trickle = true;
    req.residency = [&](const Scheme& s, std::int32_t completion) {
      const double c = crossing(dg, table_.ceiling(s));
      if (c == kNever) return kNever;
      return c - 1.0 - (oldest_age + completion);
    };
    req.cost = [&](const Scheme& s) {
      const MechanismContext ctx{g0.scheme, s, m, cap, g0.size(), tp().fill_fraction, tp().max_fill};
      const Mechanism mech = pick_mechanism(ctx);
      const IoCost c = transition_cost(mech, g0.scheme, s, m, cap, g0.size(), tp().fill_fraction, tp().max_fill);
      return std::make_pair(c, paced_days(c.total(), bw, io().peak_io_cap));
    };
    const auto choice = plan_target(req, table_, tp(), io(), groups());
    if (!choice) continue;
    const int to = choice->rgroup >= 0 ? choice->rgroup : new_rgroup(RgroupKind::kTrickleShared, choice->scheme, std::nullopt, day);
    const MechanismContext ctx{g0.scheme, choice->scheme, m, cap, g0.size(), tp().fill_fraction, tp().max_fill};
    auto plan = schedule_rdn(list, rgroups_[0], to, *choice, pick_mechanism(ctx), cap, day, 0);
    locked_out += m;
    submit(std::move(*plan), 0, false, choice->duration_days + choice->residency_days, day);
  }
}

void Simulation::decide_trickle_rup(Date day, int gid) {
  const Rgroup& g = rgroups_[static_cast<std::size_t>(gid)];
  const Scheme cur = g.scheme;
  const bool reactive = policy_ == PolicyKind::kReactive;
  std::map<int, std::vector<std::int32_t>> due;
  const double bw = static_cast<double>(g.size()) * daily();
  for (std::int32_t idx : g.members) {
    const Disk& d = disks_[static_cast<std::size_t>(idx)];
    if (d.plan >= 0) continue;
    const DgroupLearner& L = learners_[static_cast<std::size_t>(d.dgroup)];
    if (!L.curve().has_support()) continue;
    if (reactive) {
      if (L.afr_at(age(d, day)).value_or(0.0) >= table_.tolerated(cur)) due[d.dgroup].push_back(idx);
      continue;
    }
    const double c = crossing(d.dgroup, table_.ceiling(cur));
    if (c == kNever) continue;
    // Lead time of a single-disk EMPTY at the group's cap, plus a day.
    const std::int32_t lead = paced_days(2.0 * d.capacity, bw, io().peak_io_cap) + 1;
    if (age(d, day) >= c - lead) due[d.dgroup].push_back(idx);
  }
  for (auto& [dg, list] : due) {
    const auto m = static_cast<std::int64_t>(list.size());
    std::stable_sort(list.begin(), list.end(), [&](std::int32_t a, std::int32_t b) {
      return disks_[static_cast<std::size_t>(a)].deploy < disks_[static_cast<std::size_t>(b)].deploy;
    });
    const Disk& oldest = disks_[static_cast<std::size_t>(list.front())];
    const std::int32_t oldest_age = age(oldest, day);
    const DgroupLearner& L = learners_[static_cast<std::size_t>(dg)];
    double cap = 0.0;
    for (std::int32_t idx : list) cap += disks_[static_cast<std::size_t>(idx)].capacity;
    cap /= static_cast<double>(m);
    const double c_cur = crossing(dg, table_.ceiling(cur));
    const double need_afr = L.afr_at(c_cur == kNever ? oldest_age : std::max<std::int32_t>(oldest_age, static_cast<std::int32_t>(c_cur)))
                                .value_or(0.0);

    auto mechanism_for = [&](const Scheme& s) {
      if (reactive) return Mechanism::kReencode;
      const MechanismContext ctx{cur, s, m, cap, g.size(), tp().fill_fraction, tp().max_fill};
      return pick_mechanism(ctx);
    };
    Scheme to_scheme = rc().scheme0;
    int to = 0;
    double end_days = kNever;
    if (reactive) {
      to_scheme = table_.best_at(need_afr);
      if (to_scheme.overhead() <= cur.overhead()) to_scheme = upgrade_fallback(cur, need_afr);
      to = 0;
      for (const Rgroup* r : groups()) {
        if (r->kind == RgroupKind::kTrickleShared && r->scheme == to_scheme) to = r->id;
      }
      if (to == 0 && !(to_scheme == rc().scheme0)) to = new_rgroup(RgroupKind::kTrickleShared, to_scheme, std::nullopt, day);
    } else {
      PlanRequest req;
      req.disks = m;
      req.capacity = cap;
      req.current = cur;
      req.afr_now = need_afr;
      req.rdn = false;
      req.trickle = true;
      req.residency = [&](const Scheme& s, std::int32_t completion) {
        const double c = crossing(dg, table_.ceiling(s));
        if (c == kNever) return kNever;
        return c - 1.0 - (oldest_age + completion);
      };
      req.cost = [&](const Scheme& s) {
        const Mechanism mech = mechanism_for(s);
        const IoCost c = transition_cost(mech, cur, s, m, cap, g.size(), tp().fill_fraction, tp().max_fill);
        return std::make_pair(c, paced_days(c.total(), bw, io().peak_io_cap));
      };
      const auto choice = plan_target(req, table_, tp(), io(), groups());
      if (choice) {
        to_scheme = choice->scheme;
        to = choice->rgroup >= 0 ? choice->rgroup : new_rgroup(RgroupKind::kTrickleShared, to_scheme, std::nullopt, day);
        end_days = choice->duration_days + choice->residency_days;
      }
    }
    const Rgroup& src = rgroups_[static_cast<std::size_t>(gid)];
    TransitionPlan p;
    p.disks = list;
    p.from_rgroup = gid;
    p.to_rgroup = to;
    p.from_scheme = cur;
    p.to_scheme = to_scheme;
    p.mechanism = mechanism_for(to_scheme);
    const IoCost c = transition_cost(p.mechanism, cur, to_scheme, m, cap, src.size(), tp().fill_fraction, tp().max_fill);
    p.total_read_bytes = c.read;
    p.total_write_bytes = c.write;
    p.reencode_bytes = transition_cost(Mechanism::kReencode, cur, to_scheme, m, cap, src.size()).total();
    p.earliest_start = day;
    if (reactive) {
      p.urgency = Urgency::kEmergency;
      p.uncapped = true;
      p.deadline = day;
    } else {
      const std::int32_t duration = paced_days(p.total_bytes(), bw, io().peak_io_cap);
      const double c_tol = crossing(dg, table_.tolerated(cur));
      if (c_tol != kNever) {
        const Date cross = oldest.deploy + static_cast<std::int32_t>(c_tol);
        if (day + duration > cross) {
          p.urgency = Urgency::kEmergency;
          p.deadline = std::max(day, cross);
        }
      }
    }
    submit(std::move(p), gid, true, end_days, day);
  }
}

void Simulation::execute(Date day, DailyReport& rep) {
  const double cap = io().peak_io_cap;
  const auto result = limiter_.run_day(
      day, [&](int gid) { return cap * static_cast<double>(rgroups_[static_cast<std::size_t>(gid)].size()) * daily(); },
      static_cast<double>(live_) * daily());
  for (const auto& [gid, bytes] : result.capped_per_rgroup) {
    Rgroup& g = rgroups_[static_cast<std::size_t>(gid)];
    g.io_ledger[day.days()] += bytes;
    // Ledger cap: scheduled non-emergency bytes within the group's share.
    const double allowed = cap * static_cast<double>(g.size()) * daily();
    if (g.io_ledger[day.days()] > allowed * (1 + 1e-9) + 1.0) {
      ++audit_.ledger_cap;
      if (audit_.messages.size() < 20) audit_.messages.push_back("Rgroup " + std::to_string(g.id) + " over cap on " + day.iso());
    }
  }
  for (const auto& [gid, bytes] : result.emergency_per_rgroup) {
    rgroups_[static_cast<std::size_t>(gid)].emergency_ledger[day.days()] += bytes;
    if (bytes > 0) rep.emergency = true;
  }
  std::vector<int> done;
  for (const auto& [pid, bytes] : result.per_plan) {
    PlanRecord& rec = plans_[static_cast<std::size_t>(pid)];
    rec.executed_bytes += bytes;
    rep.transition_bytes += bytes;
    rep.rgroup_transition_bytes[plan_charged_.at(pid)] += bytes;
    if (rec.plan.urgency == Urgency::kEmergency) rep.emergency = true;
    if (rec.plan.urgency != Urgency::kEmergency && !rec.plan.disks.empty()) {
      // Bytes are attributed evenly to the disks being transitioned.
      const double share = bytes / static_cast<double>(rec.plan.disks.size());
      for (std::int32_t idx : rec.plan.disks) disks_[static_cast<std::size_t>(idx)].bytes += share;
    }
    if (!limiter_.active(pid)) done.push_back(pid);
  }
  for (int pid : done) complete(pid, day);
  // Plans whose disks all left the cluster are dropped.
  std::vector<int> orphaned;
  for (const auto& [pid, charged] : plan_charged_) {
    const PlanRecord& rec = plans_[static_cast<std::size_t>(pid)];
    const bool empty = rec.plan.whole_group ? rgroups_[static_cast<std::size_t>(rec.plan.from_rgroup)].members.empty()
                                            : rec.plan.disks.empty();
    if (empty) orphaned.push_back(pid);
  }
  for (int pid : orphaned) {
    limiter_.forget(pid);
    complete(pid, day);
  }
}

void Simulation::complete(int pid, Date day) {
  PlanRecord& rec = plans_[static_cast<std::size_t>(pid)];
  if (rec.completed) return;
  rec.completed = day;
  plan_charged_.erase(pid);
  const TransitionPlan& p = rec.plan;
  const bool rdn = p.is_rdn();
  std::vector<std::int32_t> moving;
  if (p.whole_group) {
    busy_.erase(p.from_rgroup);
    Rgroup& g = rgroups_[static_cast<std::size_t>(p.from_rgroup)];
    g.scheme = p.to_scheme;
    rgroup_records_[static_cast<std::size_t>(g.id)].schemes.emplace_back(day, p.to_scheme);
    moving.assign(g.members.begin(), g.members.end());
  } else {
    moving = p.disks;
  }
  for (std::int32_t idx : moving) {
    Disk& d = disks_[static_cast<std::size_t>(idx)];
    if (!d.alive) continue;
    d.plan = -1;
    if (rdn) d.rdn_done = true;
    if (d.rgroup != p.to_rgroup) move_disk(idx, p.to_rgroup);
  }
  if (p.whole_group && p.to_rgroup != p.from_rgroup) {
    Rgroup& g = rgroups_[static_cast<std::size_t>(p.from_rgroup)];
    g.retired = true;
    rgroup_records_[static_cast<std::size_t>(g.id)].retired = day;
  }
}

void Simulation::account(Date day, DailyReport& rep) {
  rep.date = day;
  rep.disks = live_;
  if (const auto it = recon_.find(day.days()); it != recon_.end()) {
    rep.reconstruction_bytes = it->second;
    recon_.erase(it);
  }
  const double bw = static_cast<double>(live_) * daily();
  rep.transition_frac = bw > 0 ? rep.transition_bytes / bw : 0.0;
  rep.reconstruction_frac = bw > 0 ? rep.reconstruction_bytes / bw : 0.0;

  const Scheme s0 = rc().scheme0;
  const double r0 = static_cast<double>(s0.k) / s0.n;
  for (const Rgroup& g : rgroups_) {
    if (g.retired) continue;
    rep.rgroup_disks[g.id] = g.size();
    const double tol = table_.tolerated(g.scheme);
    const double r = static_cast<double>(g.scheme.k) / g.scheme.n;
    for (std::int32_t idx : g.members) {
      const Disk& d = disks_[static_cast<std::size_t>(idx)];
      const std::int32_t a = age(d, day);
      const double truth = truth_at(d.dgroup, a);
      rep.logical_static += d.capacity * r0;
      if (policy_ == PolicyKind::kIdeal) {
        const DgroupLearner& L = learners_[static_cast<std::size_t>(d.dgroup)];
        const auto inf = L.infancy_end();
        const bool eligible = !d.canary && inf && a >= *inf;
        std::pair<Scheme, double> pick{s0, table_.tolerated(s0)};
        if (eligible || truth > pick.second) pick = ideal_for(d.dgroup, a);
        rep.logical_adaptive += d.capacity * pick.first.k / pick.first.n;
        if (truth > pick.second) ++rep.underprotected;
      } else {
        rep.logical_adaptive += d.capacity * r;
        if (truth > tol) ++rep.underprotected;
      }
    }
  }
  rep.savings = rep.logical_adaptive > 0 ? 1.0 - rep.logical_static / rep.logical_adaptive : 0.0;

}

void Simulation::audit_partition() {
  std::vector<std::int64_t> counts(rgroups_.size(), 0);
  std::int64_t live = 0;
  for (const Disk& d : disks_) {
    if (!d.alive) continue;
    ++live;
    ++counts[static_cast<std::size_t>(d.rgroup)];
  }
  std::int64_t members = 0;
  for (std::size_t g = 0; g < rgroups_.size(); ++g) {
    members += rgroups_[g].size();
    if (counts[g] != rgroups_[g].size() || (rgroups_[g].retired && counts[g] > 0)) {
      ++audit_.partition;
      if (audit_.messages.size() < 20) audit_.messages.push_back("Rgroup " + std::to_string(g) + " membership mismatch");
    }
  }
  if (live != members || live != live_) {
    ++audit_.partition;
    if (audit_.messages.size() < 20) audit_.messages.push_back("live disks not partitioned across Rgroups");
  }
}

void Simulation::finish(RunResult& out) {
  for (const Disk& d : disks_) {
    if (d.canary && d.rgroup != 0) ++audit_.canary_moves;
    const double life = static_cast<double>(d.end - d.deploy);
    const double span = std::max(life, d.planned_end_age);
    const double bound = io().avg_io * daily() * span;
    if (d.bytes > bound * (1 + 1e-9) + 1.0) {
      ++audit_.avg_io;
      if (audit_.messages.size() < 20) {
        audit_.messages.push_back("disk " + d.id + " exceeds the average-IO bound (" + std::to_string(d.bytes / daily()) +
                                  " bandwidth-days over " + std::to_string(span) + " days)");
      }
    }
  }
  RunSummary& s = out.summary;
  s.policy = policy_;
  s.days = static_cast<std::int64_t>(out.reports.size());
  double stat = 0.0;
  double adap = 0.0;
  for (const DailyReport& r : out.reports) {
    s.max_transition_frac = std::max(s.max_transition_frac, r.transition_frac);
    s.underprotected_disk_days += r.underprotected;
    s.emergency_days += r.emergency ? 1 : 0;
    s.transition_bytes += r.transition_bytes;
    s.reconstruction_bytes += r.reconstruction_bytes;
    stat += r.logical_static;
    adap += r.logical_adaptive;
  }
  s.savings = adap > 0 ? 1.0 - stat / adap : 0.0;
  for (const PlanRecord& p : plans_) {
    ++s.plans;
    if (p.plan.urgency == Urgency::kEmergency) ++s.emergency_plans;
    const double total = p.plan.total_bytes();
    if (total > 0) s.reencode_equivalent_bytes += p.plan.reencode_bytes * (p.executed_bytes / total);
  }
  out.plans = plans_;
  out.rgroups = rgroup_records_;
  out.audit = audit_;
}

RunResult Simulation::run() {
  cfg_.validate();
  RunResult out;
  if (trace_.events.empty()) {
    out.summary.policy = policy_;
    return out;
  }
  index();
  build_truth();
  new_rgroup(RgroupKind::kDefault, rc().scheme0, std::nullopt, trace_.start_date);
  for (Date day = trace_.start_date; day <= trace_.end_date; ++day) {
    std::vector<std::int32_t> failed;
    apply_events(day, failed);
    learn(day, failed);
    close_batches(day);
    decide(day);
    DailyReport rep;
    execute(day, rep);
    account(day, rep);
    audit_partition();
    out.reports.push_back(std::move(rep));
  }
  finish(out);
  return out;
}

}  // namespace

RunResult run(const ClusterTrace& trace, PolicyKind policy, const SimConfig& config) {
  return Simulation(trace, policy, config).run();
}

}  // namespace diskadapt

#include "diskadapt/afr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace diskadapt {

double afr_point(double failures, double exposure_years) {
  if (!(exposure_years > 0)) throw std::invalid_argument("afr_point: exposure must be > 0");
  if (failures < 0) throw std::invalid_argument("afr_point: failures must be >= 0");
  return failures / exposure_years * 100.0;
}

// ---------------------------------------------------------------------------
// ExposureTable

ExposureTable::ExposureTable(std::vector<std::int64_t> at_risk, std::vector<std::int64_t> failures)
    : at_risk_(std::move(at_risk)), failures_(std::move(failures)) {
  if (at_risk_.size() != failures_.size()) {
    throw std::invalid_argument("ExposureTable: at_risk and failures differ in length");
  }
  validate();
}

void ExposureTable::grow(std::int32_t age) {
  if (age < 0) throw std::invalid_argument("ExposureTable: negative age");
  if (static_cast<std::size_t>(age) >= at_risk_.size()) {
    at_risk_.resize(static_cast<std::size_t>(age) + 1, 0);
    failures_.resize(static_cast<std::size_t>(age) + 1, 0);
  }
}

void ExposureTable::add_at_risk(std::int32_t age, std::int64_t count) {
  grow(age);
  at_risk_[static_cast<std::size_t>(age)] += count;
}

void ExposureTable::add_failure(std::int32_t age) {
  grow(age);
  failures_[static_cast<std::size_t>(age)] += 1;
}

std::int64_t ExposureTable::at_risk(std::int32_t age) const {
  return age >= 0 && static_cast<std::size_t>(age) < at_risk_.size() ? at_risk_[static_cast<std::size_t>(age)] : 0;
}

std::int64_t ExposureTable::failures(std::int32_t age) const {
  return age >= 0 && static_cast<std::size_t>(age) < failures_.size() ? failures_[static_cast<std::size_t>(age)]
                                                                        : 0;
}

void ExposureTable::validate() const {
  for (std::size_t i = 0; i < at_risk_.size(); ++i) {
    if (failures_[i] < 0 || failures_[i] > at_risk_[i]) {
      throw std::invalid_argument("ExposureTable: need 0 <= d_i <= a_i at age " + std::to_string(i));
    }
  }
}

ExposureTable exposure_table(const ClusterTrace& trace, const std::string& dgroup, Date as_of) {
  struct Life {
    Date deploy;
    Date end;  // exclusive
    bool failed = false;
  };
  std::unordered_map<std::string, Life> lives;
  bool known = false;
  for (const DiskEvent& e : trace.events) {
    if (e.dgroup != dgroup) continue;
    known = true;
    if (e.kind == EventKind::kDeploy) {
      lives[e.disk_id] = Life{e.date, as_of, false};
    } else if (auto it = lives.find(e.disk_id); it != lives.end()) {
      it->second.failed = e.kind == EventKind::kFail;
      it->second.end = e.kind == EventKind::kFail ? e.date + 1 : e.date;
    }
  }
  if (!known) throw std::invalid_argument("unknown dgroup '" + dgroup + "'");

  // Difference array over lifetimes: a_i = #disks with observed life > i.
  std::vector<std::int64_t> ends;
  std::vector<std::int64_t> fails;
  for (const auto& [id, life] : lives) {
    if (life.deploy >= as_of) continue;
    const Date end = std::min(life.end, as_of);
    const std::int32_t days = end - life.deploy;
    if (days <= 0) continue;
    if (ends.size() < static_cast<std::size_t>(days) + 1) {
      ends.resize(static_cast<std::size_t>(days) + 1, 0);
      fails.resize(static_cast<std::size_t>(days) + 1, 0);
    }
    ends[static_cast<std::size_t>(days)] += 1;
    if (life.failed && life.end <= as_of) fails[static_cast<std::size_t>(days - 1)] += 1;
  }
  if (ends.empty()) return {};
  const std::size_t m = ends.size() - 1;  // longest life in days
  std::vector<std::int64_t> at_risk(m, 0);
  std::vector<std::int64_t> failures(m, 0);
  std::int64_t alive = 0;
  for (std::size_t i = m; i-- > 0;) {
    alive += ends[i + 1];
    at_risk[i] = alive;
    failures[i] = fails[i];
  }
  return ExposureTable(std::move(at_risk), std::move(failures));
}

std::vector<double> nelson_aalen(const ExposureTable& table) {
  std::vector<double> cum(table.at_risk().size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    const auto a = table.at_risk()[i];
    if (a > 0) sum += static_cast<double>(table.failures()[i]) / static_cast<double>(a);
    cum[i] = sum;
  }
  return cum;
}

// ---------------------------------------------------------------------------
// Smoothing

void KernelConfig::validate() const {
  if (bandwidth < 1) throw std::invalid_argument("kernel bandwidth must be >= 1 day");
}

double epanechnikov(double u, double bandwidth) {
  const double x = u / bandwidth;
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return 0.75 * (1.0 - x * x) / bandwidth;
}

HazardCurve HazardCurve::from_afr(std::vector<double> afr_pct) {
  HazardCurve c;
  const std::size_t n = afr_pct.size();
  c.hazard_.resize(n);
  c.cum_hazard_.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c.hazard_[i] = afr_pct[i] / 100.0 / kDaysPerYear;
    sum += c.hazard_[i];
    c.cum_hazard_[i] = sum;
  }
  c.afr_ = std::move(afr_pct);
  c.afr_stderr_.assign(n, 0.0);
  c.at_risk_.assign(n, 0);
  c.failures_.assign(n, 0);
  c.support_begin_ = 0;
  c.support_end_ = static_cast<std::int32_t>(n) - 1;
  return c;
}

void HazardCurve::cap_support(std::int32_t age) { support_end_ = std::min(support_end_, age); }

void HazardCurve::write_csv(std::ostream& out) const {
  out << "age_day,at_risk,failures,cum_hazard,afr_pct\n";
  char buf[64];
  for (std::int32_t i = 0; i < size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    std::snprintf(buf, sizeof(buf), "%.10g", cum_hazard_[k]);
    out << i << ',' << at_risk_[k] << ',' << failures_[k] << ',' << buf << ',';
    if (in_support(i)) {
      std::snprintf(buf, sizeof(buf), "%.6f", afr_[k]);
      out << buf;
    }
    out << '\n';
  }
}

HazardCurve smoothed_hazard(const ExposureTable& table, const KernelConfig& kernel,
                            const SupportOptions& support) {
  kernel.validate();
  HazardCurve c;
  const auto n = static_cast<std::int32_t>(table.at_risk().size());
  c.at_risk_ = table.at_risk();
  c.failures_ = table.failures();
  c.cum_hazard_ = nelson_aalen(table);
  c.hazard_.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> var(static_cast<std::size_t>(n), 0.0);

  const std::int32_t b = kernel.bandwidth;
  std::vector<double> weights(static_cast<std::size_t>(2 * b + 1));
  for (std::int32_t u = -b; u <= b; ++u) weights[static_cast<std::size_t>(u + b)] = epanechnikov(u, b);

  for (std::int32_t i = 0; i < n; ++i) {
    const auto d = table.failures()[static_cast<std::size_t>(i)];
    if (d == 0) continue;
    const double a = static_cast<double>(table.at_risk()[static_cast<std::size_t>(i)]);
    const double inc = static_cast<double>(d) / a;
    const double inc_var = static_cast<double>(d) / (a * a);
    const std::int32_t lo = std::max(0, i - b + 1);
    const std::int32_t hi = std::min(n - 1, i + b - 1);
    for (std::int32_t t = lo; t <= hi; ++t) {
      const double w = weights[static_cast<std::size_t>(t - i + b)];
      c.hazard_[static_cast<std::size_t>(t)] += inc * w;
      var[static_cast<std::size_t>(t)] += inc_var * w * w;
    }
  }

  c.afr_.resize(static_cast<std::size_t>(n));
  c.afr_stderr_.resize(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < static_cast<std::size_t>(n); ++t) {
    c.afr_[t] = c.hazard_[t] * kDaysPerYear * 100.0;
    c.afr_stderr_[t] = std::sqrt(var[t]) * kDaysPerYear * 100.0;
  }

  // a_i is non-increasing in age, so the at-risk gate leaves a prefix.
  std::int32_t end = -1;
  while (end + 1 < n && table.at_risk()[static_cast<std::size_t>(end + 1)] >= support.min_at_risk) ++end;
  if (support.exclude_trailing_edge) end = std::min(end, n - 1 - b);
  if (support.max_age >= 0) end = std::min(end, support.max_age);
  c.support_begin_ = 0;
  c.support_end_ = end;
  return c;
}

// ---------------------------------------------------------------------------
// Projection

double AfrProjection::at(std::int32_t age) const {
  return std::max(0.0, current_afr + slope * static_cast<double>(age - at_age));
}

AfrProjection project_afr(const HazardCurve& curve, std::int32_t window) {
  if (window < 2) throw std::invalid_argument("project_afr: window must be >= 2 days");
  if (curve.support_length() < window) {
    throw std::invalid_argument("project_afr: support of " + std::to_string(curve.support_length()) +
                                " days is shorter than the " + std::to_string(window) + "-day window");
  }
  const std::int32_t last = curve.support_end();
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::int32_t back = 0; back < window; ++back) {
    const double x = -static_cast<double>(back);
    const double r = static_cast<double>(back) / static_cast<double>(window);
    const double w = 1.0 - r * r;
    const double y = curve.afr_at(last - back);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double denom = sw * sxx - sx * sx;
  AfrProjection p;
  p.at_age = last;
  p.slope = (sw * sxy - sx * sy) / denom;
  p.current_afr = (sy - p.slope * sx) / sw;
  return p;
}

// ---------------------------------------------------------------------------
// Useful-life phases

const UsefulLifePhase* UsefulLifePhases::find(std::int32_t age) const {
  for (const auto& p : phases) {
    if (age >= p.start_age && age <= p.end_age) return &p;
  }
  return nullptr;
}

UsefulLifePhases decompose_useful_life(const HazardCurve& curve, double tolerance, int max_phases,
                                       std::int32_t from_age) {
  if (!(tolerance > 1.0)) throw std::invalid_argument("decompose_useful_life: tolerance must be > 1");
  if (max_phases < 1) throw std::invalid_argument("decompose_useful_life: max_phases must be >= 1");
  const std::int32_t begin = std::max(from_age, curve.support_begin());
  const std::int32_t end = curve.support_end();
  if (begin > end) throw std::invalid_argument("decompose_useful_life: empty post-infancy support");

  // Greedy maximal phases give the longest prefix: a sub-interval of a valid
  // phase is itself valid.
  UsefulLifePhases out;
  out.tolerance = tolerance;
  std::int32_t start = begin;
  while (start <= end && static_cast<int>(out.phases.size()) < max_phases) {
    double lo = curve.afr_at(start);
    double hi = lo;
    std::int32_t stop = start;
    while (stop + 1 <= end) {
      const double v = curve.afr_at(stop + 1);
      const double nlo = std::min(lo, v);
      const double nhi = std::max(hi, v);
      if (nhi > tolerance * nlo) break;
      lo = nlo;
      hi = nhi;
      ++stop;
    }
    out.phases.push_back({start, stop, hi});
    start = stop + 1;
  }
  return out;
}

std::int32_t infancy_end(const HazardCurve& curve, const InfancyOptions& options) {
  const std::int32_t s = options.stability_days;
  if (s < 1) throw std::invalid_argument("infancy_end: stability_days must be >= 1");
  const std::int32_t sentinel = curve.support_end() + 1;
  if (options.confirm_days < 0) throw std::invalid_argument("infancy_end: confirm_days must be >= 0");
  if (curve.support_length() < s) return sentinel;
  const auto& afr = curve.afr();
  const auto& se = curve.afr_stderr();
  for (std::int32_t t = curve.support_begin(); t + s - 1 + options.confirm_days <= curve.support_end(); ++t) {
    double lo = std::numeric_limits<double>::infinity();
    // The reference level also covers the confirmation span, so a window that
    // is flat but still above the level that follows it does not count.
    for (std::int32_t j = t; j < t + s + options.confirm_days; ++j) lo = std::min(lo, afr[static_cast<std::size_t>(j)]);
    const double band = (1.0 + options.relative_tolerance) * lo;
    bool stable = true;
    for (std::int32_t j = t; j < t + s && stable; ++j) {
      const auto k = static_cast<std::size_t>(j);
      stable = afr[k] - options.noise_z * se[k] <= band;
    }
    if (stable) return t;
  }
  return sentinel;
}

}  // namespace diskadapt

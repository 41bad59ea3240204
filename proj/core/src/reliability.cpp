#include "diskadapt/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "diskadapt/afr.hpp"

namespace diskadapt {

std::string Scheme::name() const { return std::to_string(k) + "-of-" + std::to_string(n); }

void Scheme::validate() const {
  if (k < 1 || n <= k) throw std::invalid_argument("invalid scheme " + name() + ": need 1 <= k < n");
}

Scheme parse_scheme(std::string_view text) {
  const auto pos = text.find("-of-");
  if (pos == std::string_view::npos) throw std::invalid_argument("bad scheme '" + std::string(text) + "'");
  Scheme s;
  try {
    std::size_t used = 0;
    const std::string ks(text.substr(0, pos));
    const std::string ns(text.substr(pos + 4));
    s.k = std::stoi(ks, &used);
    if (used != ks.size()) throw std::invalid_argument("k");
    s.n = std::stoi(ns, &used);
    if (used != ns.size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad scheme '" + std::string(text) + "'");
  }
  s.validate();
  return s;
}

double ReliabilityConfig::target_mttdl() const { return mttdl(scheme0, afr0, mttr_days); }

void ReliabilityConfig::validate() const {
  if (!(mttr_days > 0)) throw std::invalid_argument("mttr_days must be > 0");
  if (!(afr0 > 0)) throw std::invalid_argument("afr0 must be > 0");
  scheme0.validate();
  if (max_k < 1) throw std::invalid_argument("max_k must be >= 1");
  if (min_f < 1) throw std::invalid_argument("min_f must be >= 1");
  if (!(max_repair_days >= mttr_days)) throw std::invalid_argument("max_repair_days must be >= mttr_days");
}

double mttdl(const Scheme& s, double afr_pct, double mttr_days) {
  s.validate();
  if (!(afr_pct > 0)) throw std::invalid_argument("mttdl: afr must be > 0");
  if (!(mttr_days > 0)) throw std::invalid_argument("mttdl: mttr must be > 0");
  const double mttf = 100.0 / afr_pct;
  const double mttr = mttr_days / kDaysPerYear;
  // Evaluate in log space; wide schemes overflow the plain product.
  double log_denom = 0.0;
  for (int i = s.k; i <= s.n; ++i) log_denom += std::log(static_cast<double>(i));
  const int f = s.f();
  return std::exp((f + 1) * std::log(mttf) - log_denom - f * std::log(mttr));
}

double tolerated_afr(const Scheme& s, const ReliabilityConfig& rc) {
  if (s == rc.scheme0) return rc.afr0;
  const double target = rc.target_mttdl();
  double lo = 1e-4;
  double hi = 1e4;
  if (mttdl(s, lo, rc.mttr_days) < target || mttdl(s, hi, rc.mttr_days) > target) {
    throw std::domain_error("scheme " + s.name() + " cannot reach the target MTTDL within [1e-4, 1e4] %/yr");
  }
  // Bisection on log(afr); mttdl is strictly decreasing.
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (mttdl(s, mid, rc.mttr_days) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

double afr_ceiling(const Scheme& s, const ReliabilityConfig& rc) {
  return std::min(tolerated_afr(s, rc), rc.afr0 * rc.scheme0.k / s.k);
}

std::vector<Scheme> scheme_grid(int k_min, int k_max, int f_min, int f_max) {
  if (k_min < 1 || k_max < k_min || f_min < 1 || f_max < f_min) {
    throw std::invalid_argument("scheme_grid: bad bounds");
  }
  std::vector<Scheme> out;
  for (int k = k_min; k <= k_max; ++k) {
    for (int f = f_min; f <= f_max; ++f) out.push_back({k, k + f});
  }
  return out;
}

namespace {

bool structurally_viable(const Scheme& s, double afr_pct, const ReliabilityConfig& rc) {
  return s.f() >= rc.min_f && s.k <= rc.max_k && afr_pct * s.k <= rc.afr0 * rc.scheme0.k &&
         rc.repair_days(s) <= rc.max_repair_days;
}

}  // namespace

std::vector<Scheme> viable_schemes(double afr_pct, const ReliabilityConfig& rc,
                                   const std::vector<Scheme>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("viable_schemes: empty candidate set");
  if (!(afr_pct > 0)) throw std::invalid_argument("viable_schemes: afr must be > 0");
  std::vector<Scheme> out;
  for (const Scheme& s : candidates) {
    if (structurally_viable(s, afr_pct, rc) && tolerated_afr(s, rc) >= afr_pct) out.push_back(s);
  }
  return out;
}

SchemeTable::SchemeTable(ReliabilityConfig rc, std::vector<Scheme> candidates)
    : rc_(std::move(rc)), candidates_(std::move(candidates)) {
  rc_.validate();
  if (std::find(candidates_.begin(), candidates_.end(), rc_.scheme0) == candidates_.end()) {
    candidates_.push_back(rc_.scheme0);
  }
  for (const Scheme& s : candidates_) entries_.push_back({s, tolerated_afr(s, rc_)});
}

const SchemeTable::Entry* SchemeTable::find(const Scheme& s) const {
  for (const Entry& e : entries_) {
    if (e.scheme == s) return &e;
  }
  return nullptr;
}

double SchemeTable::tolerated(const Scheme& s) const {
  const Entry* e = find(s);
  return e ? e->tolerated : tolerated_afr(s, rc_);
}

double SchemeTable::ceiling(const Scheme& s) const {
  return std::min(tolerated(s), rc_.afr0 * rc_.scheme0.k / s.k);
}

bool SchemeTable::viable(const Scheme& s, double afr_pct) const {
  return structurally_viable(s, afr_pct, rc_) && tolerated(s) >= afr_pct;
}

std::vector<Scheme> SchemeTable::viable_at(double afr_pct) const {
  std::vector<Scheme> out;
  for (const Entry& e : entries_) {
    if (structurally_viable(e.scheme, afr_pct, rc_) && e.tolerated >= afr_pct) out.push_back(e.scheme);
  }
  return out;
}

Scheme SchemeTable::best_at(double afr_pct) const {
  Scheme best = rc_.scheme0;
  bool found = false;
  for (const Scheme& s : viable_at(afr_pct)) {
    if (!found || s.overhead() < best.overhead() ||
        (s.overhead() == best.overhead() && s.k < best.k)) {
      best = s;
      found = true;
    }
  }
  return best;
}

}  // namespace diskadapt

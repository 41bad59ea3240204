#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "diskadapt/date.hpp"
#include "diskadapt/trace.hpp"

namespace diskadapt {

inline constexpr double kDaysPerYear = 365.25;

/// Annualized failure rate (%/yr) from `failures` over `exposure_years`
/// disk-years. Throws std::invalid_argument when exposure_years <= 0.
double afr_point(double failures, double exposure_years);

/// Per age-day at-risk and failure counts for one Dgroup. Index i is the
/// disk's i-th day of operation (age 0 is the deploy day).
class ExposureTable {
public:
  ExposureTable() = default;
  ExposureTable(std::vector<std::int64_t> at_risk, std::vector<std::int64_t> failures);

  void add_at_risk(std::int32_t age, std::int64_t count = 1);
  void add_failure(std::int32_t age);

  const std::vector<std::int64_t>& at_risk() const { return at_risk_; }
  const std::vector<std::int64_t>& failures() const { return failures_; }

  std::int64_t at_risk(std::int32_t age) const;
  std::int64_t failures(std::int32_t age) const;

  /// Oldest observed age-day, -1 when empty.
  std::int32_t max_age() const { return static_cast<std::int32_t>(at_risk_.size()) - 1; }
  bool empty() const { return at_risk_.empty(); }

  /// Throws std::invalid_argument unless 0 <= d_i <= a_i everywhere.
  void validate() const;

private:
  void grow(std::int32_t age);

  std::vector<std::int64_t> at_risk_;
  std::vector<std::int64_t> failures_;
};

/// Exposure by age for `dgroup`, counting days strictly before `as_of`. Disks
/// are right-censored at FAIL (the failure day counts), DECOMMISSION (the
/// decommission day does not) or as_of. Throws std::invalid_argument for an
/// unknown dgroup.
ExposureTable exposure_table(const ClusterTrace& trace, const std::string& dgroup, Date as_of);

/// Nelson-Aalen cumulative hazard: H(t) = sum_{i<=t} d_i / a_i, with empty
/// days contributing zero.
std::vector<double> nelson_aalen(const ExposureTable& table);

struct KernelConfig {
  std::int32_t bandwidth = 30;
  void validate() const;
};

/// Unit-integral Epanechnikov kernel on [-b, b].
double epanechnikov(double u, double bandwidth);

struct SupportOptions {
  // Ages with fewer disks at risk are outside the curve's support.
  std::int64_t min_at_risk = 1000;
  // Drop the last `bandwidth` ages before the oldest observation, where the
  // kernel window runs past the data and the estimate is biased low.
  bool exclude_trailing_edge = true;
  // Optional hard cap on the support (e.g. the youngest canary's age).
  std::int32_t max_age = -1;
};

/// Kernel-smoothed hazard estimate over age-days.
class HazardCurve {
public:
  HazardCurve() = default;

  /// Builds a curve directly from an AFR series (%/yr), with full support and
  /// zero standard error. Used for fixtures and known profiles.
  static HazardCurve from_afr(std::vector<double> afr_pct);

  /// Smoothed hazard per day.
  const std::vector<double>& hazard() const { return hazard_; }
  const std::vector<double>& cum_hazard() const { return cum_hazard_; }
  /// %/yr per age-day; meaningful only on the support.
  const std::vector<double>& afr() const { return afr_; }
  /// Standard error of afr() from the kernel variance estimator.
  const std::vector<double>& afr_stderr() const { return afr_stderr_; }
  const std::vector<std::int64_t>& at_risk() const { return at_risk_; }
  const std::vector<std::int64_t>& failures() const { return failures_; }

  double afr_at(std::int32_t age) const { return afr_.at(static_cast<std::size_t>(age)); }

  /// Inclusive support bounds; empty when support_end() < support_begin().
  std::int32_t support_begin() const { return support_begin_; }
  std::int32_t support_end() const { return support_end_; }
  bool has_support() const { return support_end_ >= support_begin_; }
  std::int32_t support_length() const { return has_support() ? support_end_ - support_begin_ + 1 : 0; }
  bool in_support(std::int32_t age) const { return age >= support_begin_ && age <= support_end_; }
  std::int32_t size() const { return static_cast<std::int32_t>(afr_.size()); }

  /// Restricts the support to end no later than `age`.
  void cap_support(std::int32_t age);

  /// CSV `age_day,at_risk,failures,cum_hazard,afr_pct`; afr_pct is blank off
  /// the support.
  void write_csv(std::ostream& out) const;

private:
  friend HazardCurve smoothed_hazard(const ExposureTable&, const KernelConfig&, const SupportOptions&);

  std::vector<double> hazard_;
  std::vector<double> cum_hazard_;
  std::vector<double> afr_;
  std::vector<double> afr_stderr_;
  std::vector<std::int64_t> at_risk_;
  std::vector<std::int64_t> failures_;
  std::int32_t support_begin_ = 0;
  std::int32_t support_end_ = -1;
};

/// h(t) = sum_i (d_i/a_i) K(t - i) for t in [0, m]. The kernel is truncated at
/// the data edges without renormalization.
HazardCurve smoothed_hazard(const ExposureTable& table, const KernelConfig& kernel,
                            const SupportOptions& support = {});

/// Linear trend of a curve's AFR over its trailing window.
struct AfrProjection {
  // Fitted AFR (%/yr) at `at_age`, and slope in %/yr per day.
  double current_afr = 0.0;
  double slope = 0.0;
  std::int32_t at_age = 0;

  /// Projected AFR at `age`, floored at zero.
  double at(std::int32_t age) const;
};

/// Epanechnikov-weighted least squares over the last `window` supported days,
/// weights peaking at the most recent day. Throws std::invalid_argument when
/// the support is shorter than the window.
AfrProjection project_afr(const HazardCurve& curve, std::int32_t window);

struct UsefulLifePhase {
  std::int32_t start_age = 0;
  // Inclusive.
  std::int32_t end_age = 0;
  // Maximum AFR observed in the phase.
  double representative_afr = 0.0;
};

struct UsefulLifePhases {
  std::vector<UsefulLifePhase> phases;
  double tolerance = 0.0;

  std::int32_t end_age() const { return phases.empty() ? -1 : phases.back().end_age; }
  /// Phase containing `age`, or nullptr.
  const UsefulLifePhase* find(std::int32_t age) const;
};

/// Longest prefix of [from_age, support_end] that splits into at most
/// `max_phases` contiguous phases with max/min AFR <= tolerance in each.
/// Throws std::invalid_argument on bad parameters or an empty range.
UsefulLifePhases decompose_useful_life(const HazardCurve& curve, double tolerance, int max_phases,
                                       std::int32_t from_age);

struct InfancyOptions {
  std::int32_t stability_days = 30;
  // Each day in the window must be within this fraction of the window min.
  double relative_tolerance = 0.10;
  // Allowance in standard errors before a day counts as above the band.
  double noise_z = 1.0;
  // Supported days required after the window, so the kernel has seen the
  // data following it.
  std::int32_t confirm_days = 30;
};

/// Smallest supported age t such that [t, t + stability_days) is flat within
/// noise and followed by confirm_days of support. Returns support_end() + 1
/// when no such window exists.
std::int32_t infancy_end(const HazardCurve& curve, const InfancyOptions& options = {});

}  // namespace diskadapt

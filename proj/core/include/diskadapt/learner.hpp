#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "diskadapt/afr.hpp"
#include "diskadapt/date.hpp"

namespace diskadapt {

/// Online AFR learning for one Dgroup: exposure grows one day at a time from
/// deploy-day cohorts and the smoothed curve is refreshed on demand.
class DgroupLearner {
public:
  DgroupLearner(std::string dgroup, KernelConfig kernel, SupportOptions support, InfancyOptions infancy);

  const std::string& dgroup() const { return dgroup_; }

  void add_disk(Date deploy);
  /// Removes a disk from its cohort; call after advance() for failures so the
  /// failure day is counted at risk.
  void remove_disk(Date deploy);
  void record_failure(std::int32_t age);

  /// Adds one day of exposure for every live cohort.
  void advance(Date today);
  /// Re-smooths the curve. `max_age` caps the support (-1 for none).
  void refresh(std::int32_t max_age = -1);

  const ExposureTable& table() const { return table_; }
  const HazardCurve& curve() const { return curve_; }

  /// Learned end of infancy; fixed once first detected.
  std::optional<std::int32_t> infancy_end() const { return infancy_end_; }

  /// Curve AFR at `age`, holding the last supported value beyond the support.
  /// nullopt without support.
  std::optional<double> afr_at(std::int32_t age) const;

private:
  std::string dgroup_;
  KernelConfig kernel_;
  SupportOptions support_;
  InfancyOptions infancy_;
  std::map<std::int32_t, std::int64_t> cohorts_;
  ExposureTable table_;
  HazardCurve curve_;
  std::optional<std::int32_t> infancy_end_;
};

}  // namespace diskadapt

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "diskadapt/trace.hpp"

namespace diskadapt::testing {

inline Date ymd(int y, unsigned m, unsigned d) { return Date::from_ymd(y, m, d); }

inline DiskEvent deploy(Date date, std::string id, std::string dgroup, std::int64_t capacity = 4'000'000'000'000,
                        std::string batch = {}) {
  return DiskEvent{date, EventKind::kDeploy, std::move(id), std::move(dgroup), capacity, std::move(batch)};
}

inline DiskEvent fail(Date date, std::string id, std::string dgroup) {
  return DiskEvent{date, EventKind::kFail, std::move(id), std::move(dgroup), std::nullopt, {}};
}

inline DiskEvent decommission(Date date, std::string id, std::string dgroup) {
  return DiskEvent{date, EventKind::kDecommission, std::move(id), std::move(dgroup), std::nullopt, {}};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("diskadapt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Single-Dgroup spec with a constant AFR.
inline DgroupSpec constant_cohort(std::string dgroup, double afr, std::int64_t count, Date first,
                                  DeploymentPattern pattern = DeploymentPattern::kStep) {
  DgroupSpec s;
  s.dgroup = std::move(dgroup);
  s.pattern = pattern;
  s.count = count;
  s.first_deploy = s.last_deploy = first;
  s.step_days = 1;
  s.profile.infancy_days = 0;
  s.profile.infancy_afr = afr;
  s.profile.phases = {{1, afr}};
  s.profile.wearout_slope = 0.0;
  return s;
}

}  // namespace diskadapt::testing

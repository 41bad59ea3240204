#include "diskadapt/learner.hpp"

#include <algorithm>
#include <stdexcept>

namespace diskadapt {

DgroupLearner::DgroupLearner(std::string dgroup, KernelConfig kernel, SupportOptions support, InfancyOptions infancy)
    : dgroup_(std::move(dgroup)), kernel_(kernel), support_(support), infancy_(infancy) {
  kernel_.validate();
}

void DgroupLearner::add_disk(Date deploy) { cohorts_[deploy.days()] += 1; }

void DgroupLearner::remove_disk(Date deploy) {
  const auto it = cohorts_.find(deploy.days());
  if (it == cohorts_.end() || it->second <= 0) throw std::logic_error("remove_disk: empty cohort");
  if (--it->second == 0) cohorts_.erase(it);
}

void DgroupLearner::record_failure(std::int32_t age) { table_.add_failure(age); }

void DgroupLearner::advance(Date today) {
  for (const auto& [deploy, alive] : cohorts_) {
    const std::int32_t age = today.days() - deploy;
    if (age >= 0) table_.add_at_risk(age, alive);
  }
}

void DgroupLearner::refresh(std::int32_t max_age) {
  SupportOptions support = support_;
  if (max_age >= 0) support.max_age = support.max_age >= 0 ? std::min(support.max_age, max_age) : max_age;
  curve_ = smoothed_hazard(table_, kernel_, support);
  if (!infancy_end_ && curve_.support_length() >= infancy_.stability_days) {
    const std::int32_t t = diskadapt::infancy_end(curve_, infancy_);
    if (t <= curve_.support_end()) infancy_end_ = t;
  }
}

std::optional<double> DgroupLearner::afr_at(std::int32_t age) const {
  if (!curve_.has_support()) return std::nullopt;
  return curve_.afr_at(std::clamp(age, curve_.support_begin(), curve_.support_end()));
}

}  // namespace diskadapt

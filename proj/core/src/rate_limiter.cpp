#include <algorithm>
#include <numeric>

#include "diskadapt/orchestrator.hpp"

namespace diskadapt {

std::vector<double> water_fill(const std::vector<double>& demands, double budget) {
  std::vector<std::size_t> order(demands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return demands[a] < demands[b]; });
  std::vector<double> grants(demands.size(), 0.0);
  double left = std::max(0.0, budget);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double share = left / static_cast<double>(order.size() - i);
    const double g = std::min(std::max(0.0, demands[order[i]]), share);
    grants[order[i]] = g;
    left -= g;
  }
  return grants;
}

void RateLimiter::submit(const TransitionPlan& plan, int charged_rgroup) {
  Job job;
  job.rgroup = charged_rgroup;
  job.remaining = plan.total_bytes();
  job.urgency = plan.urgency;
  job.deadline = plan.deadline;
  job.earliest = plan.earliest_start;
  job.uncapped = plan.uncapped;
  jobs_[plan.id] = job;
}

void RateLimiter::forget(int plan_id) { jobs_.erase(plan_id); }

double RateLimiter::remaining(int plan_id) const {
  const auto it = jobs_.find(plan_id);
  return it == jobs_.end() ? 0.0 : it->second.remaining;
}

std::vector<int> RateLimiter::plans_on(int rgroup_id) const {
  std::vector<int> out;
  for (const auto& [id, job] : jobs_) {
    if (job.rgroup == rgroup_id) out.push_back(id);
  }
  return out;
}

RateLimiter::DayResult RateLimiter::run_day(Date today, const std::function<double(int)>& allowance,
                                            double cluster_daily_bytes) {
  DayResult out;
  std::map<int, std::vector<int>> capped;
  std::vector<int> uncapped;
  for (const auto& [id, job] : jobs_) {
    if (job.earliest > today) continue;
    if (job.uncapped) {
      uncapped.push_back(id);
    } else {
      capped[job.rgroup].push_back(id);
    }
  }

  for (const auto& [rgroup, ids] : capped) {
    std::vector<double> demands;
    for (int id : ids) demands.push_back(jobs_[id].remaining);
    const std::vector<double> grants = water_fill(demands, allowance(rgroup));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Job& job = jobs_[ids[i]];
      double g = grants[i];
      if (job.urgency == Urgency::kEmergency) {
        const std::int32_t days_left = job.deadline ? std::max(1, *job.deadline - today + 1) : 1;
        g = std::min(job.remaining, std::max(g, job.remaining / days_left));
        out.emergency_per_rgroup[rgroup] += g;
      } else {
        out.capped_per_rgroup[rgroup] += g;
      }
      out.per_plan[ids[i]] = g;
    }
  }

  if (!uncapped.empty()) {
    std::vector<double> demands;
    for (int id : uncapped) demands.push_back(jobs_[id].remaining);
    const std::vector<double> grants = water_fill(demands, cluster_daily_bytes);
    for (std::size_t i = 0; i < uncapped.size(); ++i) {
      out.per_plan[uncapped[i]] = grants[i];
      out.emergency_per_rgroup[jobs_[uncapped[i]].rgroup] += grants[i];
    }
  }

  for (const auto& [id, bytes] : out.per_plan) {
    Job& job = jobs_[id];
    job.remaining -= bytes;
    out.total += bytes;
    if (job.remaining <= 0.5) jobs_.erase(id);
  }
  return out;
}

}  // namespace diskadapt

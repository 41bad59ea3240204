#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "diskadapt/trace.hpp"

namespace diskadapt {

double SyntheticAfrProfile::afr_at(std::int32_t age_day) const {
  if (age_day < infancy_days) return infancy_afr;
  std::int32_t start = infancy_days;
  for (const Phase& p : phases) {
    if (age_day < start + p.duration_days) return p.afr;
    start += p.duration_days;
  }
  const double base = phases.empty() ? infancy_afr : phases.back().afr;
  return base + wearout_slope * static_cast<double>(age_day - start);
}

std::int32_t SyntheticAfrProfile::wearout_start() const {
  std::int32_t start = infancy_days;
  for (const Phase& p : phases) start += p.duration_days;
  return start;
}

void SyntheticAfrProfile::validate() const {
  if (infancy_days < 0) throw std::invalid_argument("infancy_days must be >= 0");
  if (infancy_afr < 0) throw std::invalid_argument("infancy_afr must be >= 0");
  for (const Phase& p : phases) {
    if (p.duration_days <= 0) throw std::invalid_argument("phase duration must be > 0");
    if (p.afr < 0) throw std::invalid_argument("phase afr must be >= 0");
  }
  if (wearout_slope < 0) throw std::invalid_argument("wearout_slope must be >= 0");
}

std::string_view to_string(DeploymentPattern p) {
  return p == DeploymentPattern::kStep ? "step" : "trickle";
}

DeploymentPattern parse_deployment_pattern(std::string_view text) {
  if (text == "step") return DeploymentPattern::kStep;
  if (text == "trickle") return DeploymentPattern::kTrickle;
  throw std::invalid_argument("unknown deployment pattern '" + std::string(text) + "'");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1); avoids std::uniform_real_distribution, whose output is
// not specified bit-for-bit across standard libraries.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Age (days) at which a disk fails, or nullopt if it survives past max_age.
std::optional<std::int32_t> sample_failure_age(const SyntheticAfrProfile& profile,
                                               std::int32_t max_age, std::mt19937_64& rng) {
  const double budget = -std::log(open_unit(rng));
  double cum = 0.0;
  for (std::int32_t age = 0; age <= max_age; ++age) {
    cum += profile.afr_at(age) / 100.0 / 365.25;
    if (cum >= budget) return age;
  }
  return std::nullopt;
}

std::string disk_name(const std::string& prefix, std::int64_t index, int width) {
  std::string digits = std::to_string(index);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + "-" + digits;
}

}  // namespace

ClusterTrace generate_trace(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.dgroups.empty()) throw std::invalid_argument("generator spec has no dgroups");

  std::set<std::string> prefixes;
  for (const DgroupSpec& g : spec.dgroups) {
    const std::string prefix = g.id_prefix.empty() ? g.dgroup : g.id_prefix;
    if (!prefixes.insert(prefix).second) {
      throw std::invalid_argument("overlapping disk_id namespace '" + prefix + "'");
    }
  }

  ClusterTrace trace;
  for (std::size_t gi = 0; gi < spec.dgroups.size(); ++gi) {
    const DgroupSpec& g = spec.dgroups[gi];
    if (g.dgroup.empty()) throw std::invalid_argument("dgroup label must be non-empty");
    if (g.count <= 0) throw std::invalid_argument("dgroup '" + g.dgroup + "': count must be > 0");
    if (g.capacity <= 0) throw std::invalid_argument("dgroup '" + g.dgroup + "': capacity must be > 0");
    g.profile.validate();
    if (g.pattern == DeploymentPattern::kStep && (g.step_days < 1 || g.step_days > 7)) {
      throw std::invalid_argument("dgroup '" + g.dgroup + "': step deployments span 1..7 days");
    }
    if (g.pattern == DeploymentPattern::kTrickle && g.last_deploy < g.first_deploy) {
      throw std::invalid_argument("dgroup '" + g.dgroup + "': last_deploy precedes first_deploy");
    }

    const std::string prefix = g.id_prefix.empty() ? g.dgroup : g.id_prefix;
    const std::string batch =
        g.batch_tag ? *g.batch_tag : (g.pattern == DeploymentPattern::kStep ? g.dgroup + "-step" : "");
    const int width = std::max(6, static_cast<int>(std::to_string(g.count - 1).size()));
    const std::int64_t span =
        g.pattern == DeploymentPattern::kStep ? g.step_days : (g.last_deploy - g.first_deploy) + 1;

    for (std::int64_t j = 0; j < g.count; ++j) {
      const Date deploy = g.first_deploy + static_cast<std::int32_t>(j * span / g.count);
      if (deploy > spec.end_date) continue;
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64((gi + 1) * 0x10000000ULL + static_cast<std::uint64_t>(j))));

      DiskEvent dep;
      dep.date = deploy;
      dep.kind = EventKind::kDeploy;
      dep.disk_id = disk_name(prefix, j, width);
      dep.dgroup = g.dgroup;
      dep.capacity = g.capacity;
      dep.batch_tag = batch;

      std::int32_t max_age = spec.end_date - deploy;
      if (g.retire_age_days) max_age = std::min(max_age, *g.retire_age_days - 1);
      const auto fail_age = sample_failure_age(g.profile, max_age, rng);
      trace.events.push_back(dep);
      if (fail_age) {
        DiskEvent f;
        f.date = deploy + *fail_age;
        f.kind = EventKind::kFail;
        f.disk_id = dep.disk_id;
        f.dgroup = g.dgroup;
        f.batch_tag = batch;
        trace.events.push_back(std::move(f));
      } else if (g.retire_age_days && deploy + *g.retire_age_days <= spec.end_date) {
        DiskEvent d;
        d.date = deploy + *g.retire_age_days;
        d.kind = EventKind::kDecommission;
        d.disk_id = dep.disk_id;
        d.dgroup = g.dgroup;
        d.batch_tag = batch;
        trace.events.push_back(std::move(d));
      }
    }
  }
  canonicalize(trace);
  Date start = spec.dgroups.front().first_deploy;
  for (const DgroupSpec& g : spec.dgroups) start = std::min(start, g.first_deploy);
  trace.start_date = start;
  trace.end_date = spec.end_date;
  return trace;
}

}  // namespace diskadapt

#include "diskadapt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace diskadapt {

using nlohmann::json;

namespace {

class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string sub(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key " + path_ + "." + k);
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_ + ": " + msg); }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Scheme scheme_from(const json& j, const std::string& path) {
  try {
    return parse_scheme(j.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Date date_from(const json& j, const std::string& path) {
  try {
    return Date::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

SyntheticAfrProfile profile_from(const json& j, const std::string& path) {
  Reader r(j, path);
  SyntheticAfrProfile p;
  r.get("infancy_days", p.infancy_days);
  r.get("infancy_afr", p.infancy_afr);
  r.get("wearout_slope", p.wearout_slope);
  if (const json* phases = r.child("phases")) {
    if (!phases->is_array()) throw ConfigError(r.sub("phases") + ": expected an array");
    for (std::size_t i = 0; i < phases->size(); ++i) {
      Reader pr((*phases)[i], r.sub("phases") + "[" + std::to_string(i) + "]");
      SyntheticAfrProfile::Phase ph;
      pr.get("duration_days", ph.duration_days);
      pr.get("afr", ph.afr);
      pr.finish();
      p.phases.push_back(ph);
    }
  }
  r.finish();
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return p;
}

DgroupSpec dgroup_from(const json& j, const std::string& path) {
  Reader r(j, path);
  DgroupSpec d;
  r.get("dgroup", d.dgroup);
  if (const json* p = r.child("profile")) d.profile = profile_from(*p, r.sub("profile"));
  if (const json* p = r.child("pattern")) {
    try {
      d.pattern = parse_deployment_pattern(p->get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(r.sub("pattern") + ": " + e.what());
    }
  }
  r.get("count", d.count);
  if (const json* v = r.child("first_deploy")) d.first_deploy = date_from(*v, r.sub("first_deploy"));
  d.last_deploy = d.first_deploy;
  if (const json* v = r.child("last_deploy")) d.last_deploy = date_from(*v, r.sub("last_deploy"));
  r.get("step_days", d.step_days);
  double capacity = static_cast<double>(d.capacity);
  r.get("capacity", capacity);
  d.capacity = static_cast<std::int64_t>(capacity);
  r.get("id_prefix", d.id_prefix);
  if (const json* v = r.child("batch_tag")) d.batch_tag = v->get<std::string>();
  if (const json* v = r.child("retire_age_days")) d.retire_age_days = v->get<std::int32_t>();
  r.finish();
  if (d.dgroup.empty()) throw ConfigError(path + ".dgroup: required");
  return d;
}

json profile_to(const SyntheticAfrProfile& p) {
  json phases = json::array();
  for (const auto& ph : p.phases) phases.push_back({{"duration_days", ph.duration_days}, {"afr", ph.afr}});
  return {{"infancy_days", p.infancy_days}, {"infancy_afr", p.infancy_afr}, {"phases", phases},
          {"wearout_slope", p.wearout_slope}};
}

}  // namespace

void RunConfig::validate() const {
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (generator && generator->dgroups.empty()) throw ConfigError("generator.dgroups: empty");
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  RunConfig c;
  Reader r(j, "$");
  r.get("seed", c.seed);
  if (const json* v = r.child("policy")) {
    try {
      c.policy = parse_policy(v->get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("$.policy: ") + e.what());
    }
  }
  r.get("output_dir", c.output_dir);
  r.get("truth_from_generator", c.truth_from_generator);

  if (const json* v = r.child("io")) {
    Reader s(*v, r.sub("io"));
    s.get("peak_io_cap", c.sim.io.peak_io_cap);
    s.get("avg_io", c.sim.io.avg_io);
    s.get("per_disk_bandwidth", c.sim.io.per_disk_bandwidth);
    s.finish();
  }
  if (const json* v = r.child("reliability")) {
    Reader s(*v, r.sub("reliability"));
    s.get("mttr_days", c.sim.reliability.mttr_days);
    s.get("afr0", c.sim.reliability.afr0);
    if (const json* sc = s.child("scheme0")) c.sim.reliability.scheme0 = scheme_from(*sc, s.sub("scheme0"));
    s.get("max_k", c.sim.reliability.max_k);
    s.get("min_f", c.sim.reliability.min_f);
    s.get("max_repair_days", c.sim.reliability.max_repair_days);
    s.finish();
  }
  if (const json* v = r.child("transition")) {
    Reader s(*v, r.sub("transition"));
    TransitionPolicy& t = c.sim.transition;
    s.get("canary_count", t.canary_count);
    s.get("threshold_fraction", t.threshold_fraction);
    s.get("phase_tolerance", t.phase_tolerance);
    s.get("max_phases", t.max_phases);
    s.get("min_rgroup_size", t.min_rgroup_size);
    s.get("min_new_rgroup_savings", t.min_new_rgroup_savings);
    s.get("projection_window", t.projection_window);
    s.get("step_window_days", t.step_window_days);
    s.get("fill_fraction", t.fill_fraction);
    s.get("max_fill", t.max_fill);
    s.finish();
  }
  if (const json* v = r.child("scheme_grid")) {
    Reader s(*v, r.sub("scheme_grid"));
    int k_min = 3, k_max = 50, f_min = 2, f_max = 4;
    s.get("k_min", k_min);
    s.get("k_max", k_max);
    s.get("f_min", f_min);
    s.get("f_max", f_max);
    s.finish();
    try {
      c.sim.candidates = scheme_grid(k_min, k_max, f_min, f_max);
    } catch (const std::exception& e) {
      throw ConfigError(r.sub("scheme_grid") + ": " + e.what());
    }
  }
  if (const json* v = r.child("schemes")) {
    if (!v->is_array() || v->empty()) throw ConfigError("$.schemes: expected a non-empty array");
    c.sim.candidates.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.sim.candidates.push_back(scheme_from((*v)[i], "$.schemes[" + std::to_string(i) + "]"));
    }
  }
  if (const json* v = r.child("kernel")) {
    Reader s(*v, r.sub("kernel"));
    s.get("bandwidth", c.sim.kernel.bandwidth);
    s.finish();
  }
  if (const json* v = r.child("support")) {
    Reader s(*v, r.sub("support"));
    s.get("min_at_risk", c.sim.support.min_at_risk);
    s.get("exclude_trailing_edge", c.sim.support.exclude_trailing_edge);
    s.finish();
  }
  if (const json* v = r.child("infancy")) {
    Reader s(*v, r.sub("infancy"));
    s.get("stability_days", c.sim.infancy.stability_days);
    s.get("relative_tolerance", c.sim.infancy.relative_tolerance);
    s.get("noise_z", c.sim.infancy.noise_z);
    s.get("confirm_days", c.sim.infancy.confirm_days);
    s.finish();
  }
  if (const json* v = r.child("generator")) {
    Reader s(*v, r.sub("generator"));
    GeneratorSpec g;
    if (const json* e = s.child("end_date")) g.end_date = date_from(*e, s.sub("end_date"));
    else throw ConfigError(s.sub("end_date") + ": required");
    if (const json* ds = s.child("dgroups")) {
      if (!ds->is_array()) throw ConfigError(s.sub("dgroups") + ": expected an array");
      for (std::size_t i = 0; i < ds->size(); ++i) {
        g.dgroups.push_back(dgroup_from((*ds)[i], s.sub("dgroups") + "[" + std::to_string(i) + "]"));
      }
    }
    s.finish();
    c.generator = std::move(g);
  }
  r.finish();
  c.validate();
  if (c.truth_from_generator) attach_generator_truth(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void attach_generator_truth(RunConfig& config) {
  if (!config.generator) return;
  for (const DgroupSpec& d : config.generator->dgroups) config.sim.truth[d.dgroup] = d.profile;
}

std::string dump_config(const RunConfig& c) {
  const SimConfig& s = c.sim;
  json schemes = json::array();
  for (const Scheme& sc : s.candidates) schemes.push_back(sc.name());
  json j = {
      {"seed", c.seed},
      {"policy", std::string(to_string(c.policy))},
      {"output_dir", c.output_dir},
      {"truth_from_generator", c.truth_from_generator},
      {"io", {{"peak_io_cap", s.io.peak_io_cap}, {"avg_io", s.io.avg_io}, {"per_disk_bandwidth", s.io.per_disk_bandwidth}}},
      {"reliability",
       {{"mttr_days", s.reliability.mttr_days},
        {"afr0", s.reliability.afr0},
        {"scheme0", s.reliability.scheme0.name()},
        {"max_k", s.reliability.max_k},
        {"min_f", s.reliability.min_f},
        {"max_repair_days", s.reliability.max_repair_days}}},
      {"transition",
       {{"canary_count", s.transition.canary_count},
        {"threshold_fraction", s.transition.threshold_fraction},
        {"phase_tolerance", s.transition.phase_tolerance},
        {"max_phases", s.transition.max_phases},
        {"min_rgroup_size", s.transition.min_rgroup_size},
        {"min_new_rgroup_savings", s.transition.min_new_rgroup_savings},
        {"projection_window", s.transition.projection_window},
        {"step_window_days", s.transition.step_window_days},
        {"fill_fraction", s.transition.fill_fraction},
        {"max_fill", s.transition.max_fill}}},
      {"schemes", schemes},
      {"kernel", {{"bandwidth", s.kernel.bandwidth}}},
      {"support", {{"min_at_risk", s.support.min_at_risk}, {"exclude_trailing_edge", s.support.exclude_trailing_edge}}},
      {"infancy",
       {{"stability_days", s.infancy.stability_days},
        {"relative_tolerance", s.infancy.relative_tolerance},
        {"noise_z", s.infancy.noise_z},
        {"confirm_days", s.infancy.confirm_days}}},
  };
  if (c.generator) {
    json ds = json::array();
    for (const DgroupSpec& d : c.generator->dgroups) {
      json dj = {{"dgroup", d.dgroup},
                 {"profile", profile_to(d.profile)},
                 {"pattern", std::string(to_string(d.pattern))},
                 {"count", d.count},
                 {"first_deploy", d.first_deploy.iso()},
                 {"last_deploy", d.last_deploy.iso()},
                 {"step_days", d.step_days},
                 {"capacity", d.capacity}};
      if (!d.id_prefix.empty()) dj["id_prefix"] = d.id_prefix;
      if (d.batch_tag) dj["batch_tag"] = *d.batch_tag;
      if (d.retire_age_days) dj["retire_age_days"] = *d.retire_age_days;
      ds.push_back(dj);
    }
    j["generator"] = {{"end_date", c.generator->end_date.iso()}, {"dgroups", ds}};
  }
  return j.dump(2) + "\n";
}

}  // namespace diskadapt

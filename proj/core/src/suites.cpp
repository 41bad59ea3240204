#include "diskadapt/suites.hpp"

namespace diskadapt {

RunConfig default_mixed_suite() {
  RunConfig c;
  c.seed = 7;
  GeneratorSpec g;
  g.end_date = Date::from_ymd(2023, 12, 31);

  DgroupSpec step;
  step.dgroup = "S-1";
  step.pattern = DeploymentPattern::kStep;
  step.count = 20000;
  step.first_deploy = step.last_deploy = Date::from_ymd(2020, 1, 1);
  step.step_days = 3;
  step.profile.infancy_days = 25;
  step.profile.infancy_afr = 8.0;
  step.profile.phases = {{400, 1.5}, {400, 1.8}};
  step.profile.wearout_slope = 0.004;
  g.dgroups.push_back(step);

  DgroupSpec trickle;
  trickle.dgroup = "T-1";
  trickle.pattern = DeploymentPattern::kTrickle;
  trickle.count = 10000;
  trickle.first_deploy = Date::from_ymd(2020, 1, 1);
  trickle.last_deploy = Date::from_ymd(2020, 12, 31);
  trickle.profile.infancy_days = 20;
  trickle.profile.infancy_afr = 6.0;
  trickle.profile.phases = {{400, 1.0}, {600, 1.3}};
  trickle.profile.wearout_slope = 0.0003;
  g.dgroups.push_back(trickle);

  c.generator = std::move(g);
  attach_generator_truth(c);
  return c;
}

RunConfig steep_ramp_suite() {
  RunConfig c;
  c.seed = 11;
  GeneratorSpec g;
  g.end_date = Date::from_ymd(2022, 11, 15);

  DgroupSpec step;
  step.dgroup = "S-2";
  step.pattern = DeploymentPattern::kStep;
  step.count = 20000;
  step.first_deploy = step.last_deploy = Date::from_ymd(2020, 1, 1);
  step.step_days = 3;
  step.profile.infancy_days = 25;
  step.profile.infancy_afr = 8.0;
  step.profile.phases = {{900, 1.5}};
  step.profile.wearout_slope = 0.03;
  g.dgroups.push_back(step);

  c.generator = std::move(g);
  attach_generator_truth(c);
  return c;
}

}  // namespace diskadapt

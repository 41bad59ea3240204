#pragma once

#include "diskadapt/config.hpp"

namespace diskadapt {

/// One 20k-disk step Dgroup with a gradual wear-out ramp plus one 10k-disk
/// trickle Dgroup, over four years.
RunConfig default_mixed_suite();

/// One 20k-disk step Dgroup whose AFR ramps steeply late in the horizon.
RunConfig steep_ramp_suite();

}  // namespace diskadapt

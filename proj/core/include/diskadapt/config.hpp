#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "diskadapt/simulator.hpp"
#include "diskadapt/trace.hpp"

namespace diskadapt {

/// Everything one command run needs. Defaults: peak 5%, avg 1%, threshold
/// 75%, canaries 3000, scheme0 6-of-9 at 16%/yr, 100 MB/s per disk.
struct RunConfig {
  SimConfig sim;
  std::optional<GeneratorSpec> generator;
  std::uint64_t seed = 1;
  PolicyKind policy = PolicyKind::kPacemaker;
  std::string output_dir = "out";
  // Score under-protection against the generator profiles when the trace
  // comes from this config's generator.
  bool truth_from_generator = true;

  void validate() const;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON document. Unknown keys and out-of-range values raise
/// ConfigError with the offending key path.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& config);

/// Copies the generator's profiles into sim.truth.
void attach_generator_truth(RunConfig& config);

}  // namespace diskadapt

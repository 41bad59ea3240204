#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diskadapt/date.hpp"

namespace diskadapt {

enum class EventKind : std::uint8_t { kDeploy = 0, kFail = 1, kDecommission = 2 };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct DiskEvent {
  Date date;
  EventKind kind = EventKind::kDeploy;
  std::string disk_id;
  std::string dgroup;
  // Bytes; set on DEPLOY only.
  std::optional<std::int64_t> capacity;
  std::string batch_tag;

  bool operator==(const DiskEvent&) const = default;
};

/// Date-ordered disk events. Ordering within a day is DEPLOY < FAIL <
/// DECOMMISSION, then disk_id.
struct ClusterTrace {
  std::vector<DiskEvent> events;
  Date start_date;
  Date end_date;

  bool empty() const { return events.empty(); }
};

/// Raised for malformed trace input. `line()` is 1-based, 0 when the error is
/// not tied to a single line.
class TraceError : public std::runtime_error {
public:
  TraceError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

inline constexpr std::string_view kTraceHeader = "date,kind,disk_id,dgroup,capacity,batch_tag";

/// Sorts events canonically (stable) and checks the per-disk lifecycle
/// invariants. Recomputes start/end dates from the events when `events` is
/// non-empty.
void canonicalize(ClusterTrace& trace);

ClusterTrace parse_trace(std::istream& in);
ClusterTrace parse_trace(const std::filesystem::path& path);
ClusterTrace parse_trace_text(std::string_view text);

void write_trace(const ClusterTrace& trace, std::ostream& out);
std::string write_trace_text(const ClusterTrace& trace);

/// Converts a directory of daily `YYYY-MM-DD.csv` status snapshots (columns
/// date, serial_number, model, capacity_bytes, failure; extra columns are
/// ignored). Warnings are appended to `warnings` when non-null.
ClusterTrace convert_daily_status(const std::filesystem::path& dir,
                                  std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Synthetic generation

/// Piecewise ground-truth AFR curve over disk age (days). AFRs in %/yr.
struct SyntheticAfrProfile {
  struct Phase {
    std::int32_t duration_days = 0;
    double afr = 0.0;
  };

  std::int32_t infancy_days = 0;
  double infancy_afr = 0.0;
  std::vector<Phase> phases;
  // %/yr added per day of age after the last phase ends.
  double wearout_slope = 0.0;

  /// Ground-truth AFR (%/yr) at a given age.
  double afr_at(std::int32_t age_day) const;
  /// Age at which the last useful-life phase ends.
  std::int32_t wearout_start() const;
  void validate() const;
};

enum class DeploymentPattern : std::uint8_t { kTrickle, kStep };

std::string_view to_string(DeploymentPattern p);
DeploymentPattern parse_deployment_pattern(std::string_view text);

struct DgroupSpec {
  std::string dgroup;
  SyntheticAfrProfile profile;
  DeploymentPattern pattern = DeploymentPattern::kTrickle;
  std::int64_t count = 0;
  Date first_deploy;
  // trickle: last deploy date; step: ignored (see step_days).
  Date last_deploy;
  std::int32_t step_days = 3;
  std::int64_t capacity = 4'000'000'000'000;
  // Disk ids are `<id_prefix>-<index>`; defaults to the dgroup label.
  std::string id_prefix;
  // Batch label for every disk of this spec; step specs default to
  // `<dgroup>-step`, trickle specs default to none.
  std::optional<std::string> batch_tag;
  // Surviving disks are decommissioned at this age, if set.
  std::optional<std::int32_t> retire_age_days;
};

struct GeneratorSpec {
  std::vector<DgroupSpec> dgroups;
  Date end_date;
};

/// Draws per-disk lifetimes from the piecewise-exponential model with daily
/// hazard AFR/100/365.25. Deterministic in (spec, seed) on every platform.
ClusterTrace generate_trace(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace diskadapt

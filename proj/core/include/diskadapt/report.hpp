#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "diskadapt/simulator.hpp"

namespace diskadapt {

/// `date,disks,transition_frac,reconstruction_frac,savings,underprotected,emergency`
void write_report_csv(const RunResult& result, std::ostream& out);

/// `date,rgroup,kind,scheme,disks,transition_bytes`, one row per live Rgroup
/// per day.
void write_rgroup_csv(const RunResult& result, std::ostream& out);

/// `date,plan_id,urgency,mechanism,from_scheme,to_scheme,disks,read_bytes,write_bytes,duration_days`;
/// duration is blank for plans still running at the end of the trace.
void write_transition_log(const RunResult& result, std::ostream& out);

/// Header line for write_summary_row.
void write_summary_header(std::ostream& out);
void write_summary_row(const RunSummary& summary, std::ostream& out);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace diskadapt

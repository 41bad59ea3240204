#include "diskadapt/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace diskadapt {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

void write_report_csv(const RunResult& result, std::ostream& out) {
  out << "date,disks,transition_frac,reconstruction_frac,savings,underprotected,emergency\n";
  for (const DailyReport& r : result.reports) {
    out << r.date.iso() << ',' << r.disks << ',' << fmt("%.9g", r.transition_frac) << ','
        << fmt("%.9g", r.reconstruction_frac) << ',' << fmt("%.9g", r.savings) << ',' << r.underprotected << ','
        << (r.emergency ? 1 : 0) << '\n';
  }
}

void write_rgroup_csv(const RunResult& result, std::ostream& out) {
  out << "date,rgroup,kind,scheme,disks,transition_bytes\n";
  for (const DailyReport& r : result.reports) {
    for (const auto& [gid, count] : r.rgroup_disks) {
      const RgroupRecord& rec = result.rgroups.at(static_cast<std::size_t>(gid));
      Scheme scheme = rec.schemes.front().second;
      for (const auto& [date, s] : rec.schemes) {
        if (date <= r.date) scheme = s;
      }
      const auto it = r.rgroup_transition_bytes.find(gid);
      out << r.date.iso() << ',' << gid << ',' << to_string(rec.kind) << ',' << scheme.name() << ',' << count << ','
          << fmt("%.0f", it == r.rgroup_transition_bytes.end() ? 0.0 : it->second) << '\n';
    }
  }
}

void write_transition_log(const RunResult& result, std::ostream& out) {
  out << "date,plan_id,urgency,mechanism,from_scheme,to_scheme,disks,read_bytes,write_bytes,duration_days\n";
  for (const PlanRecord& rec : result.plans) {
    const TransitionPlan& p = rec.plan;
    out << rec.start.iso() << ',' << p.id << ',' << to_string(p.urgency) << ',' << to_string(p.mechanism) << ','
        << p.from_scheme.name() << ',' << p.to_scheme.name() << ',' << p.disks.size() << ','
        << fmt("%.0f", p.total_read_bytes) << ',' << fmt("%.0f", p.total_write_bytes) << ',';
    if (rec.completed) out << (*rec.completed - rec.start + 1);
    out << '\n';
  }
}

void write_summary_header(std::ostream& out) {
  out << "policy,days,max_transition_frac,savings,underprotected_disk_days,emergency_plans,plans,"
         "transition_bytes,reencode_equivalent_bytes,reconstruction_bytes\n";
}

void write_summary_row(const RunSummary& s, std::ostream& out) {
  out << to_string(s.policy) << ',' << s.days << ',' << fmt("%.9g", s.max_transition_frac) << ','
      << fmt("%.9g", s.savings) << ',' << s.underprotected_disk_days << ',' << s.emergency_plans << ',' << s.plans << ','
      << fmt("%.0f", s.transition_bytes) << ',' << fmt("%.0f", s.reencode_equivalent_bytes) << ','
      << fmt("%.0f", s.reconstruction_bytes) << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace diskadapt

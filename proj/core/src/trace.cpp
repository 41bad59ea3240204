#include "diskadapt/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace diskadapt {

TraceError::TraceError(const std::string& what, std::size_t line)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kDeploy:
      return "DEPLOY";
    case EventKind::kFail:
      return "FAIL";
    case EventKind::kDecommission:
      return "DECOMMISSION";
  }
  return "?";
}

EventKind parse_event_kind(std::string_view text) {
  if (text == "DEPLOY") return EventKind::kDeploy;
  if (text == "FAIL") return EventKind::kFail;
  if (text == "DECOMMISSION") return EventKind::kDecommission;
  throw std::invalid_argument("unknown event kind '" + std::string(text) + "'");
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct Lifecycle {
  bool deployed = false;
  bool ended = false;
  Date deploy_date;
};

// Checks lifecycle invariants over canonically ordered events. `lines` maps
// each event to its source line (empty when not parsed from text).
void check_lifecycles(const std::vector<DiskEvent>& events, const std::vector<std::size_t>& lines) {
  std::unordered_map<std::string, Lifecycle> seen;
  seen.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const DiskEvent& e = events[i];
    const std::size_t line = lines.empty() ? 0 : lines[i];
    Lifecycle& lc = seen[e.disk_id];
    if (e.kind == EventKind::kDeploy) {
      if (lc.deployed) throw TraceError("duplicate DEPLOY for disk '" + e.disk_id + "'", line);
      if (!e.capacity) throw TraceError("DEPLOY without capacity for disk '" + e.disk_id + "'", line);
      if (*e.capacity <= 0) {
        throw TraceError("non-positive capacity for disk '" + e.disk_id + "'", line);
      }
      lc.deployed = true;
      lc.deploy_date = e.date;
    } else {
      if (!lc.deployed) {
        throw TraceError(std::string(to_string(e.kind)) + " before DEPLOY for disk '" + e.disk_id + "'",
                         line);
      }
      if (lc.ended) {
        throw TraceError("disk '" + e.disk_id + "' has more than one FAIL/DECOMMISSION", line);
      }
      if (e.capacity) {
        throw TraceError("capacity given on non-DEPLOY event for disk '" + e.disk_id + "'", line);
      }
      lc.ended = true;
    }
  }
}

bool canonical_less(const DiskEvent& a, const DiskEvent& b) {
  if (a.date != b.date) return a.date < b.date;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.disk_id < b.disk_id;
}

}  // namespace

void canonicalize(ClusterTrace& trace) {
  std::stable_sort(trace.events.begin(), trace.events.end(), canonical_less);
  check_lifecycles(trace.events, {});
  if (!trace.events.empty()) {
    trace.start_date = trace.events.front().date;
    trace.end_date = trace.events.back().date;
  }
}

ClusterTrace parse_trace(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw TraceError("missing header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') throw TraceError("CRLF line endings are not accepted", 1);
  if (line != kTraceHeader) {
    throw TraceError("bad header, expected '" + std::string(kTraceHeader) + "'", 1);
  }

  struct Parsed {
    DiskEvent event;
    std::size_t line;
  };
  std::vector<Parsed> parsed;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r') throw TraceError("CRLF line endings are not accepted", line_no);
    const auto fields = split_commas(line);
    if (fields.size() != 6) {
      throw TraceError("expected 6 fields, got " + std::to_string(fields.size()), line_no);
    }
    DiskEvent e;
    try {
      e.date = Date::parse(fields[0]);
      e.kind = parse_event_kind(fields[1]);
    } catch (const std::invalid_argument& ex) {
      throw TraceError(ex.what(), line_no);
    }
    if (fields[2].empty()) throw TraceError("empty disk_id", line_no);
    e.disk_id = std::string(fields[2]);
    e.dgroup = std::string(fields[3]);
    if (!fields[4].empty()) {
      std::int64_t cap = 0;
      const auto f = fields[4];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), cap);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw TraceError("invalid capacity '" + std::string(f) + "'", line_no);
      }
      if (cap < 0) throw TraceError("negative capacity for disk '" + e.disk_id + "'", line_no);
      e.capacity = cap;
    }
    e.batch_tag = std::string(fields[5]);
    if (e.kind == EventKind::kDeploy && e.dgroup.empty()) {
      throw TraceError("DEPLOY without dgroup for disk '" + e.disk_id + "'", line_no);
    }
    parsed.push_back({std::move(e), line_no});
  }

  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const Parsed& a, const Parsed& b) { return canonical_less(a.event, b.event); });
  ClusterTrace trace;
  std::vector<std::size_t> lines;
  trace.events.reserve(parsed.size());
  lines.reserve(parsed.size());
  for (auto& p : parsed) {
    trace.events.push_back(std::move(p.event));
    lines.push_back(p.line);
  }
  check_lifecycles(trace.events, lines);
  if (!trace.events.empty()) {
    trace.start_date = trace.events.front().date;
    trace.end_date = trace.events.back().date;
  }
  return trace;
}

ClusterTrace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file '" + path.string() + "'");
  return parse_trace(in);
}

ClusterTrace parse_trace_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

void write_trace(const ClusterTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const DiskEvent& e : trace.events) {
    out << e.date.iso() << ',' << to_string(e.kind) << ',' << e.disk_id << ',' << e.dgroup << ',';
    if (e.capacity) out << *e.capacity;
    out << ',' << e.batch_tag << '\n';
  }
}

std::string write_trace_text(const ClusterTrace& trace) {
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

}  // namespace diskadapt

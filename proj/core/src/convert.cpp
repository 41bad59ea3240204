#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <regex>

#include "diskadapt/trace.hpp"

namespace diskadapt {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

struct SerialState {
  std::string model;
  std::int64_t capacity = 0;
  Date first_seen;
  Date last_seen;
  std::optional<Date> failed;
  bool warned_capacity = false;
  bool warned_after_fail = false;
};

}  // namespace

ClusterTrace convert_daily_status(const std::filesystem::path& dir, std::vector<std::string>* warnings) {
  namespace fs = std::filesystem;
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  if (!fs::is_directory(dir)) throw TraceError("not a directory: '" + dir.string() + "'");
  static const std::regex kName(R"((\d{4}-\d{2}-\d{2})\.csv)");
  std::vector<std::pair<Date, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, kName)) continue;
    files.emplace_back(Date::parse(m[1].str()), entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw TraceError("no YYYY-MM-DD.csv snapshots in '" + dir.string() + "'");
  const Date last_snapshot = files.back().first;

  std::map<std::string, SerialState> serials;
  for (const auto& [file_date, path] : files) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw TraceError("empty snapshot '" + path.string() + "'");
    const auto header = split_row(line);
    auto column = [&](const char* name) -> std::size_t {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) {
        throw TraceError("snapshot '" + path.filename().string() + "' is missing required column '" +
                         name + "'");
      }
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_date = column("date");
    const std::size_t c_serial = column("serial_number");
    const std::size_t c_model = column("model");
    const std::size_t c_cap = column("capacity_bytes");
    const std::size_t c_fail = column("failure");
    const std::size_t needed = std::max({c_date, c_serial, c_model, c_cap, c_fail}) + 1;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto row = split_row(line);
      if (row.size() < needed) {
        throw TraceError(path.filename().string() + ": too few columns", line_no);
      }
      Date day;
      try {
        day = Date::parse(row[c_date]);
      } catch (const std::invalid_argument& ex) {
        throw TraceError(path.filename().string() + ": " + ex.what(), line_no);
      }
      if (day != file_date) {
        throw TraceError(path.filename().string() + ": row date " + day.iso() + " does not match file name",
                         line_no);
      }
      const std::string& serial = row[c_serial];
      if (serial.empty()) throw TraceError(path.filename().string() + ": empty serial_number", line_no);
      std::int64_t cap = 0;
      std::from_chars(row[c_cap].data(), row[c_cap].data() + row[c_cap].size(), cap);
      const bool failed_today = row[c_fail] == "1";

      auto [it, inserted] = serials.try_emplace(serial);
      SerialState& s = it->second;
      if (inserted) {
        s.model = row[c_model];
        s.capacity = cap > 0 ? cap : 0;
        s.first_seen = day;
      } else if (s.failed) {
        if (!s.warned_after_fail) {
          warn("serial " + serial + " reappears after failing on " + s.failed->iso() + "; ignored");
          s.warned_after_fail = true;
        }
        continue;
      } else if (cap > 0) {
        if (s.capacity == 0) {
          s.capacity = cap;
        } else if (cap != s.capacity && !s.warned_capacity) {
          warn("serial " + serial + " has inconsistent capacity; keeping " + std::to_string(s.capacity));
          s.warned_capacity = true;
        }
      }
      s.last_seen = day;
      if (failed_today) s.failed = day;
    }
  }

  ClusterTrace trace;
  for (const auto& [serial, s] : serials) {
    if (s.capacity <= 0) {
      warn("serial " + serial + " never reports a positive capacity; skipped");
      continue;
    }
    DiskEvent dep;
    dep.date = s.first_seen;
    dep.kind = EventKind::kDeploy;
    dep.disk_id = serial;
    dep.dgroup = s.model;
    dep.capacity = s.capacity;
    trace.events.push_back(dep);
    if (s.failed) {
      DiskEvent f;
      f.date = *s.failed;
      f.kind = EventKind::kFail;
      f.disk_id = serial;
      f.dgroup = s.model;
      trace.events.push_back(std::move(f));
    } else if (s.last_seen < last_snapshot) {
      DiskEvent d;
      d.date = s.last_seen + 1;
      d.kind = EventKind::kDecommission;
      d.disk_id = serial;
      d.dgroup = s.model;
      trace.events.push_back(std::move(d));
    }
  }
  canonicalize(trace);
  trace.start_date = files.front().first;
  trace.end_date = last_snapshot;
  return trace;
}

}  // namespace diskadapt

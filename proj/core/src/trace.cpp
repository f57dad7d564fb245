#include "catalyst/trace.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "catalyst/errors.hpp"

namespace catalyst {

namespace {
constexpr const char* kHeader = "cost,epoch,objective,certificate,envelope,wallclock_ns";

double parse_field(const std::string& s) {
  if (s.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::stod(s);
}
}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";  // never the platform's "-nan"
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RunTrace::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

const std::string* RunTrace::find_meta(const std::string& key) const {
  for (const auto& kv : meta_) {
    if (kv.first == key) {
      return &kv.second;
    }
  }
  return nullptr;
}

void RunTrace::write_csv(std::ostream& os) const {
  for (const auto& [key, value] : meta_) {
    os << "# " << key << "=" << value << "\n";
  }
  os << kHeader << "\n";
  for (const TraceRow& r : rows_) {
    os << format_double(r.cost) << ',' << format_double(r.epoch) << ','
       << format_double(r.objective) << ',';
    if (!std::isnan(r.certificate)) {
      os << format_double(r.certificate);
    }
    os << ',';
    if (!std::isnan(r.envelope)) {
      os << format_double(r.envelope);
    }
    // The wallclock field is intentionally left empty: traces must be
    // byte-identical across repeated runs of the same configuration.
    os << ",\n";
  }
}

RunTrace RunTrace::read_csv(std::istream& is) {
  RunTrace trace;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') {
        body.erase(0, 1);
      }
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        trace.set_meta(body.substr(0, eq), body.substr(eq + 1));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw DataFormatError("unexpected trace header: " + line, line_no);
      }
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    // A trailing empty field is dropped by getline; restore it.
    if (line.back() == ',') {
      fields.emplace_back();
    }
    if (fields.size() != 6) {
      throw DataFormatError("expected 6 trace fields, got " +
                                std::to_string(fields.size()),
                            line_no);
    }
    TraceRow row;
    try {
      row.cost = parse_field(fields[0]);
      row.epoch = parse_field(fields[1]);
      row.objective = parse_field(fields[2]);
      row.certificate = parse_field(fields[3]);
      row.envelope = parse_field(fields[4]);
      row.wallclock_ns = fields[5].empty() ? -1 : std::stoll(fields[5]);
    } catch (const std::exception&) {
      throw DataFormatError("malformed trace row: " + line, line_no);
    }
    trace.add(row);
  }
  if (!header_seen) {
    throw DataFormatError("trace file has no header row");
  }
  return trace;
}

void RunTrace::write_json(std::ostream& os) const {
  nlohmann::ordered_json doc;
  auto& meta = doc["metadata"];
  meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : meta_) {
    meta[key] = value;
  }
  auto& rows = doc["rows"];
  rows = nlohmann::ordered_json::array();
  for (const TraceRow& r : rows_) {
    nlohmann::ordered_json row;
    row["cost"] = r.cost;
    row["epoch"] = r.epoch;
    row["objective"] = r.objective;
    if (std::isnan(r.certificate)) {
      row["certificate"] = nullptr;
    } else {
      row["certificate"] = r.certificate;
    }
    if (std::isnan(r.envelope)) {
      row["envelope"] = nullptr;
    } else {
      row["envelope"] = r.envelope;
    }
    row["wallclock_ns"] = nullptr;
    rows.push_back(std::move(row));
  }
  os << doc.dump(2) << "\n";
}

}  // namespace catalyst

// Cost-indexed progress traces and their CSV/JSON serialization.  Cost is
// measured in component-gradient evaluations: an incremental step costs 1
// unit, a full-gradient step costs n units, proximal and extrapolation steps
// are free.  One epoch equals n units.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace catalyst {

struct TraceRow {
  double cost = 0.0;       // cumulative cost units
  double epoch = 0.0;      // cost / n
  double objective = 0.0;  // F at the current iterate
  // Solver optimality certificate; NaN when n/a.
  double certificate = std::numeric_limits<double>::quiet_NaN();
  // Theoretical bound at this point; NaN when n/a.
  double envelope = std::numeric_limits<double>::quiet_NaN();
  std::int64_t wallclock_ns = -1;  // elapsed time; kept in memory only
};

// Trace of one run plus ordered metadata (method, seed, configuration hash,
// ...).  Serialization is deterministic: fixed column order, fixed float
// formatting, and the wallclock column is left empty so that identical
// configurations produce byte-identical files.
class RunTrace {
 public:
  void set_meta(const std::string& key, const std::string& value);
  const std::string* find_meta(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& metadata() const {
    return meta_;
  }

  void add(TraceRow row) { rows_.push_back(row); }
  const std::vector<TraceRow>& rows() const { return rows_; }
  std::vector<TraceRow>& rows() { return rows_; }
  bool empty() const { return rows_.empty(); }

  // CSV: "# key=value" metadata comments, a header line
  // cost,epoch,objective,certificate,envelope,wallclock_ns, then one row per
  // record with empty fields for NaN.
  void write_csv(std::ostream& os) const;
  static RunTrace read_csv(std::istream& is);

  // JSON mirror of the CSV: {"metadata": {...}, "rows": [...]}.
  void write_json(std::ostream& os) const;

 private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<TraceRow> rows_;
};

// Shortest deterministic decimal rendering of a double (17 significant
// digits); used for every numeric field the library writes.
std::string format_double(double v);

}  // namespace catalyst

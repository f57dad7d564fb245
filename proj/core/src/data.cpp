#include "catalyst/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "catalyst/errors.hpp"
#include "catalyst/problem.hpp"
#include "catalyst/rng.hpp"
#include "catalyst/trace.hpp"

namespace catalyst {
namespace {

// Parses a full token as a double; rejects trailing junk.
double parse_number(const std::string& token, long line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw DataFormatError("cannot parse number '" + token + "'", line);
  }
  if (pos != token.size()) {
    throw DataFormatError("cannot parse number '" + token + "'", line);
  }
  return v;
}

long long parse_integer(const std::string& token, long line) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &pos);
  } catch (const std::exception&) {
    throw DataFormatError("cannot parse integer '" + token + "'", line);
  }
  if (pos != token.size()) {
    throw DataFormatError("cannot parse integer '" + token + "'", line);
  }
  return v;
}

}  // namespace

SyntheticSpec SyntheticSpec::parse(const std::string& text) {
  SyntheticSpec spec;
  bool have_n = false;
  bool have_p = false;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("synthetic spec entry '" + item + "' is not key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "n") {
        spec.n = static_cast<int>(std::stoll(value));
        have_n = true;
      } else if (key == "p") {
        spec.p = static_cast<int>(std::stoll(value));
        have_p = true;
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "noise") {
        spec.label_noise = std::stod(value);
      } else if (key == "cond") {
        spec.condition = std::stod(value);
      } else if (key == "wnorm") {
        spec.weight_norm = std::stod(value);
      } else {
        throw ConfigError("unknown synthetic spec key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("cannot parse synthetic spec value '" + item + "'");
    }
  }
  if (!have_n || !have_p) {
    throw ConfigError("synthetic spec needs at least n=... and p=...");
  }
  if (spec.n < 1 || spec.p < 1) throw ConfigError("synthetic spec needs n, p >= 1");
  if (spec.label_noise < 0 || spec.label_noise > 1) {
    throw ConfigError("label noise must lie in [0, 1]");
  }
  if (!(spec.condition >= 1)) throw ConfigError("condition must be >= 1");
  if (spec.weight_norm < 0) throw ConfigError("weight norm must be nonnegative");
  return spec;
}

std::string SyntheticSpec::canonical() const {
  std::string s;
  s += "n=" + std::to_string(n);
  s += ",p=" + std::to_string(p);
  s += ",seed=" + std::to_string(seed);
  s += ",noise=" + format_double(label_noise);
  s += ",cond=" + format_double(condition);
  s += ",wnorm=" + format_double(weight_norm);
  return s;
}

LabeledDataset synth_logistic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.p < 1) throw ConfigError("synthetic spec needs n, p >= 1");
  if (spec.label_noise < 0 || spec.label_noise > 1) {
    throw ConfigError("label noise must lie in [0, 1]");
  }
  if (!(spec.condition >= 1)) throw ConfigError("condition must be >= 1");
  if (spec.weight_norm < 0) throw ConfigError("weight norm must be nonnegative");

  const int n = spec.n;
  const int p = spec.p;
  Rng root(spec.seed);
  Rng features = root.split(1);
  Rng label_draw = root.split(2);
  Rng flip_draw = root.split(3);
  Rng weight_draw = root.split(4);

  Vector scale(p);
  for (int j = 0; j < p; ++j) {
    scale[j] = p > 1 ? std::pow(spec.condition, -static_cast<double>(j) / (p - 1))
                     : 1.0;
  }

  // Planted weights: Gaussian direction amplified along the weak features so
  // the optimum genuinely depends on them, then normalized.
  Vector w(p);
  for (int j = 0; j < p; ++j) w[j] = weight_draw.gaussian() / scale[j];
  const double norm = w.norm();
  if (norm > 0) w *= spec.weight_norm / norm;

  Matrix rows(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) rows(i, j) = features.gaussian() * scale[j];
  }

  std::vector<double> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double margin = rows.row(i).dot(w);
    double y = label_draw.uniform01() < sigmoid(margin) ? 1.0 : -1.0;
    if (spec.label_noise > 0 && flip_draw.uniform01() < spec.label_noise) y = -y;
    labels[static_cast<std::size_t>(i)] = y;
  }
  return LabeledDataset(std::move(rows), std::move(labels));
}

LabeledDataset parse_libsvm(std::istream& in) {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> labels;
  int max_col = 0;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream tokens(line);
    std::string token;
    tokens >> token;
    const double raw_label = parse_number(token, line_no);
    double label = 0.0;
    if (raw_label == -1.0 || raw_label == 0.0) {
      label = -1.0;
    } else if (raw_label == 1.0) {
      label = 1.0;
    } else {
      throw DataFormatError("label must be -1, 0 or +1, got '" + token + "'", line_no);
    }

    std::vector<std::pair<int, double>> entries;
    long long prev_index = 0;
    while (tokens >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos) {
        throw DataFormatError("expected index:value, got '" + token + "'", line_no);
      }
      const long long index = parse_integer(token.substr(0, colon), line_no);
      const double value = parse_number(token.substr(colon + 1), line_no);
      if (index < 1) {
        throw DataFormatError("feature indices are 1-based, got " +
                                  std::to_string(index),
                              line_no);
      }
      if (index <= prev_index) {
        throw DataFormatError("feature indices must be strictly increasing (" +
                                  std::to_string(prev_index) + " then " +
                                  std::to_string(index) + ")",
                              line_no);
      }
      prev_index = index;
      max_col = std::max(max_col, static_cast<int>(index));
      entries.emplace_back(static_cast<int>(index - 1), value);
    }
    rows.push_back(std::move(entries));
    labels.push_back(label);
  }

  if (rows.empty()) {
    throw DataFormatError("no samples found in input");
  }
  return LabeledDataset(std::max(max_col, 1), std::move(rows), std::move(labels));
}

LabeledDataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return parse_libsvm(in);
}

void write_libsvm(const LabeledDataset& data, std::ostream& out) {
  for (int i = 0; i < data.num_samples(); ++i) {
    out << (data.label(i) > 0 ? "+1" : "-1");
    for (const auto& [col, value] : data.row_entries(i)) {
      out << ' ' << (col + 1) << ':' << format_double(value);
    }
    out << '\n';
  }
}

}  // namespace catalyst

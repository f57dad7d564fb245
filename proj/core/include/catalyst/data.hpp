// Dataset ingestion (libsvm text format) and seeded synthetic logistic
// problems with controllable conditioning.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "catalyst/dataset.hpp"

namespace catalyst {

// Synthetic binary classification task: Gaussian features with a geometric
// per-feature scale profile, labels sampled from the logistic model of a
// planted weight vector, optional label flips.  Fully determined by the spec
// (counter-based RNG; no platform dependence).
struct SyntheticSpec {
  int n = 0;
  int p = 0;
  std::uint64_t seed = 0;
  double label_noise = 0.0;  // each label flipped with this probability
  // Feature-scale ratio between the first and last coordinate; scales decay
  // geometrically in between.  1 = isotropic; larger = worse conditioning.
  double condition = 1.0;
  // Euclidean norm of the planted weights.  The planted weights grow inversely
  // to the feature scales so that weak directions matter for the optimum.
  double weight_norm = 4.0;

  // Parses "n=100,p=10,seed=1[,noise=0.05][,cond=100][,wnorm=4]".
  static SyntheticSpec parse(const std::string& text);
  // Canonical fixed-order key=value rendering (metadata / config hashing).
  std::string canonical() const;
};

LabeledDataset synth_logistic(const SyntheticSpec& spec);

// Text format: one sample per line, "label idx:val idx:val ..." with 1-based
// strictly increasing indices.  Labels in {-1, 0, +1}; 0/1 are remapped to
// -1/+1.  Blank lines and lines starting with '#' are skipped; CRLF accepted.
// Errors carry 1-based line numbers.
LabeledDataset parse_libsvm(std::istream& in);
LabeledDataset load_libsvm(const std::string& path);
void write_libsvm(const LabeledDataset& data, std::ostream& out);

}  // namespace catalyst

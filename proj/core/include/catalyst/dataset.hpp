// Labeled dataset for binary linear models.  Rows are stored either sparse
// (CSR) or dense row-major; narrow problems are densified automatically
// because a dense row is both smaller and faster at small width.  Labels live
// in {-1, +1}.
#pragma once

#include <utility>
#include <vector>

#include "catalyst/types.hpp"

namespace catalyst {

class LabeledDataset {
 public:
  // Width at or below which sparse input rows are stored densely.
  static constexpr int kDenseWidthLimit = 64;

  // Sparse construction.  Each row is a list of (0-based column, value)
  // pairs; columns may arrive unsorted but must not repeat within a row.
  // Throws DataFormatError on duplicate columns or out-of-range indices,
  // ConfigError on labels outside {-1,+1}, NumericError on NaN/Inf values.
  LabeledDataset(int num_features,
                 std::vector<std::vector<std::pair<int, double>>> rows,
                 std::vector<double> labels);

  // Dense construction from an (n x p) row-per-sample matrix.
  LabeledDataset(Matrix rows, std::vector<double> labels);

  int num_samples() const { return static_cast<int>(labels_.size()); }
  int num_features() const { return num_features_; }
  bool dense() const { return dense_; }
  double label(int i) const { return labels_[static_cast<std::size_t>(i)]; }

  // <a_i, x>
  double row_dot(int i, const Vector& x) const;
  // x += coef * a_i
  void row_add_scaled(int i, double coef, Vector& x) const;
  // rank-one accumulate h += coef * a_i a_i' (used by second-order oracles)
  void row_add_outer(int i, double coef, Matrix& h) const;
  double row_sq_norm(int i) const;
  double max_row_sq_norm() const;

  // Nonzero entries of row i as sorted (0-based column, value) pairs.
  std::vector<std::pair<int, double>> row_entries(int i) const;

  // Scales every nonzero row to unit Euclidean norm; zero rows are kept.
  void normalize_rows();

 private:
  void validate() const;

  int num_features_ = 0;
  bool dense_ = false;

  // dense storage (row per sample) when dense_ is true
  Matrix dense_rows_;

  // CSR storage otherwise
  std::vector<double> values_;
  std::vector<int> cols_;
  std::vector<std::size_t> row_ptr_;

  std::vector<double> labels_;
};

}  // namespace catalyst

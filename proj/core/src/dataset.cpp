#include "catalyst/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catalyst/errors.hpp"

namespace catalyst {

LabeledDataset::LabeledDataset(int num_features,
                               std::vector<std::vector<std::pair<int, double>>> rows,
                               std::vector<double> labels)
    : num_features_(num_features), labels_(std::move(labels)) {
  if (num_features <= 0) {
    throw ConfigError("dataset must have at least one feature");
  }
  if (rows.size() != labels_.size()) {
    throw ConfigError("dataset row/label count mismatch");
  }

  dense_ = num_features <= kDenseWidthLimit;
  if (dense_) {
    dense_rows_ = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), num_features);
  } else {
    row_ptr_.reserve(rows.size() + 1);
    row_ptr_.push_back(0);
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto [col, val] = row[k];
      if (col < 0 || col >= num_features) {
        throw DataFormatError("feature index " + std::to_string(col + 1) +
                              " out of range in row " + std::to_string(r + 1));
      }
      if (k > 0 && row[k - 1].first == col) {
        throw DataFormatError("duplicate feature index " + std::to_string(col + 1) +
                              " in row " + std::to_string(r + 1));
      }
      if (dense_) {
        dense_rows_(static_cast<Eigen::Index>(r), col) = val;
      } else {
        cols_.push_back(col);
        values_.push_back(val);
      }
    }
    if (!dense_) {
      row_ptr_.push_back(values_.size());
    }
  }
  validate();
}

LabeledDataset::LabeledDataset(Matrix rows, std::vector<double> labels)
    : num_features_(static_cast<int>(rows.cols())),
      dense_(true),
      dense_rows_(std::move(rows)),
      labels_(std::move(labels)) {
  if (num_features_ <= 0) {
    throw ConfigError("dataset must have at least one feature");
  }
  if (static_cast<std::size_t>(dense_rows_.rows()) != labels_.size()) {
    throw ConfigError("dataset row/label count mismatch");
  }
  validate();
}

void LabeledDataset::validate() const {
  if (labels_.empty()) {
    throw ConfigError("dataset must have at least one sample");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw ConfigError("label of sample " + std::to_string(i + 1) +
                        " must be -1 or +1");
    }
  }
  if (dense_) {
    if (!dense_rows_.allFinite()) {
      throw NumericError("dataset contains NaN or Inf feature values");
    }
  } else {
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw NumericError("dataset contains NaN or Inf feature values");
      }
    }
  }
}

double LabeledDataset::row_dot(int i, const Vector& x) const {
  if (dense_) {
    return dense_rows_.row(i).dot(x);
  }
  double acc = 0.0;
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    acc += values_[k] * x[cols_[k]];
  }
  return acc;
}

void LabeledDataset::row_add_scaled(int i, double coef, Vector& x) const {
  if (dense_) {
    x.noalias() += coef * dense_rows_.row(i).transpose();
    return;
  }
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    x[cols_[k]] += coef * values_[k];
  }
}

void LabeledDataset::row_add_outer(int i, double coef, Matrix& h) const {
  if (dense_) {
    h.noalias() += coef * dense_rows_.row(i).transpose() * dense_rows_.row(i);
    return;
  }
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    for (std::size_t l = row_ptr_[i]; l < row_ptr_[i + 1]; ++l) {
      h(cols_[k], cols_[l]) += coef * values_[k] * values_[l];
    }
  }
}

double LabeledDataset::row_sq_norm(int i) const {
  if (dense_) {
    return dense_rows_.row(i).squaredNorm();
  }
  double acc = 0.0;
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    acc += values_[k] * values_[k];
  }
  return acc;
}

std::vector<std::pair<int, double>> LabeledDataset::row_entries(int i) const {
  std::vector<std::pair<int, double>> entries;
  if (dense_) {
    for (int j = 0; j < num_features_; ++j) {
      const double v = dense_rows_(i, j);
      if (v != 0.0) entries.emplace_back(j, v);
    }
  } else {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      entries.emplace_back(cols_[k], values_[k]);
    }
  }
  return entries;
}

double LabeledDataset::max_row_sq_norm() const {
  double best = 0.0;
  for (int i = 0; i < num_samples(); ++i) {
    best = std::max(best, row_sq_norm(i));
  }
  return best;
}

void LabeledDataset::normalize_rows() {
  for (int i = 0; i < num_samples(); ++i) {
    const double norm = std::sqrt(row_sq_norm(i));
    if (norm == 0.0) {
      continue;
    }
    if (dense_) {
      dense_rows_.row(i) /= norm;
    } else {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        values_[k] /= norm;
      }
    }
  }
}

}  // namespace catalyst

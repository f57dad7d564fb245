#include "catalyst/problem.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "catalyst/errors.hpp"

namespace catalyst {

double logistic_loss(double margin) {
  // log(1 + exp(-m)) without overflow on either tail.
  if (margin >= 0.0) {
    return std::log1p(std::exp(-margin));
  }
  return -margin + std::log1p(std::exp(margin));
}

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Regularizer

namespace {
void require_nonnegative(double w, const char* what) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw ConfigError(std::string(what) + " weight must be finite and >= 0");
  }
}
}  // namespace

Regularizer Regularizer::l1(double weight) {
  require_nonnegative(weight, "l1");
  return Regularizer(weight, 0.0);
}

Regularizer Regularizer::squared_l2(double weight) {
  require_nonnegative(weight, "l2");
  return Regularizer(0.0, weight);
}

Regularizer Regularizer::elastic_net(double l1_weight, double l2_weight) {
  require_nonnegative(l1_weight, "l1");
  require_nonnegative(l2_weight, "l2");
  return Regularizer(l1_weight, l2_weight);
}

double Regularizer::value(const Vector& x) const {
  double v = 0.0;
  if (l1_ > 0.0) {
    v += l1_ * x.lpNorm<1>();
  }
  if (l2_ > 0.0) {
    v += 0.5 * l2_ * x.squaredNorm();
  }
  return v;
}

void Regularizer::prox(double step, const Vector& z, Vector& out) const {
  out.resize(z.size());
  if (is_zero()) {
    out = z;
    return;
  }
  const double threshold = step * l1_;
  const double shrink = 1.0 / (1.0 + step * l2_);
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double zj = z[j];
    double soft = 0.0;
    if (zj > threshold) {
      soft = zj - threshold;
    } else if (zj < -threshold) {
      soft = zj + threshold;
    }
    out[j] = soft * shrink;
  }
}

Vector Regularizer::prox(double step, const Vector& z) const {
  Vector out;
  prox(step, z, out);
  return out;
}

// ---------------------------------------------------------------------------
// SmoothSum defaults

double SmoothSum::value(const Vector& x) const {
  double acc = 0.0;
  const int n = components();
  for (int i = 0; i < n; ++i) {
    acc += component_value(i, x);
  }
  return acc / n;
}

void SmoothSum::gradient(const Vector& x, Vector& g) const {
  const int n = components();
  Vector gi(dim());
  g = Vector::Zero(dim());
  for (int i = 0; i < n; ++i) {
    component_gradient(i, x, gi);
    g += gi;
  }
  g /= n;
}

bool SmoothSum::quadratic_minorant(Vector& /*anchor*/, double& /*offset*/) const {
  return false;
}

void SmoothSum::hessian(const Vector& /*x*/, Matrix& /*h*/) const {
  throw ConfigError("smooth sum does not provide a Hessian oracle");
}

// ---------------------------------------------------------------------------
// LogisticSum

LogisticSum::LogisticSum(std::shared_ptr<const LabeledDataset> data, double ridge)
    : data_(std::move(data)), ridge_(ridge) {
  if (!data_) {
    throw ConfigError("logistic sum requires a dataset");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ConfigError("ridge weight must be finite and >= 0");
  }
  lipschitz_ = 0.25 * data_->max_row_sq_norm() + ridge_;
}

double LogisticSum::component_value(int i, const Vector& x) const {
  const double margin = data_->label(i) * data_->row_dot(i, x);
  double v = logistic_loss(margin);
  if (ridge_ > 0.0) {
    v += 0.5 * ridge_ * x.squaredNorm();
  }
  return v;
}

void LogisticSum::component_gradient(int i, const Vector& x, Vector& g) const {
  const double b = data_->label(i);
  const double margin = b * data_->row_dot(i, x);
  const double coef = -b * sigmoid(-margin);
  if (ridge_ > 0.0) {
    g = ridge_ * x;
  } else {
    g = Vector::Zero(x.size());
  }
  data_->row_add_scaled(i, coef, g);
}

double LogisticSum::value(const Vector& x) const {
  double acc = 0.0;
  const int n = components();
  for (int i = 0; i < n; ++i) {
    acc += logistic_loss(data_->label(i) * data_->row_dot(i, x));
  }
  double v = acc / n;
  if (ridge_ > 0.0) {
    v += 0.5 * ridge_ * x.squaredNorm();
  }
  return v;
}

void LogisticSum::gradient(const Vector& x, Vector& g) const {
  const int n = components();
  g = Vector::Zero(dim());
  for (int i = 0; i < n; ++i) {
    const double b = data_->label(i);
    const double margin = b * data_->row_dot(i, x);
    data_->row_add_scaled(i, -b * sigmoid(-margin), g);
  }
  g /= n;
  if (ridge_ > 0.0) {
    g.noalias() += ridge_ * x;
  }
}

bool LogisticSum::quadratic_minorant(Vector& anchor, double& offset) const {
  // log loss >= 0, so f_i(x) >= (ridge/2) ||x||^2.
  anchor = Vector::Zero(dim());
  offset = 0.0;
  return true;
}

void LogisticSum::hessian(const Vector& x, Matrix& h) const {
  const int n = components();
  h = Matrix::Zero(dim(), dim());
  for (int i = 0; i < n; ++i) {
    const double s = sigmoid(data_->row_dot(i, x));
    data_->row_add_outer(i, s * (1.0 - s), h);
  }
  h /= n;
  if (ridge_ > 0.0) {
    h.diagonal().array() += ridge_;
  }
}

// ---------------------------------------------------------------------------
// QuadraticSum

QuadraticSum::QuadraticSum(Matrix centers, Vector curvature)
    : centers_(std::move(centers)), curvature_(std::move(curvature)) {
  if (centers_.rows() == 0 || centers_.cols() == 0) {
    throw ConfigError("quadratic sum requires at least one center");
  }
  if (curvature_.size() != centers_.cols()) {
    throw ConfigError("curvature size must match the center dimension");
  }
  if (!(curvature_.minCoeff() > 0.0)) {
    throw ConfigError("quadratic curvature must be positive");
  }
}

double QuadraticSum::component_value(int i, const Vector& x) const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double d = x[j] - centers_(i, j);
    acc += curvature_[j] * d * d;
  }
  return 0.5 * acc;
}

void QuadraticSum::component_gradient(int i, const Vector& x, Vector& g) const {
  g = curvature_.array() * (x - centers_.row(i).transpose()).array();
}

void QuadraticSum::hessian(const Vector& /*x*/, Matrix& h) const {
  h = Matrix::Zero(dim(), dim());
  h.diagonal() = curvature_;
}

// ---------------------------------------------------------------------------
// ShiftedSmooth

ShiftedSmooth::ShiftedSmooth(std::shared_ptr<const SmoothSum> base, double kappa,
                             Vector center)
    : base_(std::move(base)), kappa_(kappa), center_(std::move(center)) {
  if (!base_) {
    throw ConfigError("shift requires a base objective");
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("shift weight kappa must be finite and > 0");
  }
  if (center_.size() != base_->dim()) {
    throw ConfigError("shift center dimension mismatch");
  }
}

double ShiftedSmooth::component_value(int i, const Vector& x) const {
  return base_->component_value(i, x) + 0.5 * kappa_ * (x - center_).squaredNorm();
}

void ShiftedSmooth::component_gradient(int i, const Vector& x, Vector& g) const {
  base_->component_gradient(i, x, g);
  g.noalias() += kappa_ * (x - center_);
}

double ShiftedSmooth::value(const Vector& x) const {
  return base_->value(x) + 0.5 * kappa_ * (x - center_).squaredNorm();
}

void ShiftedSmooth::gradient(const Vector& x, Vector& g) const {
  base_->gradient(x, g);
  g.noalias() += kappa_ * (x - center_);
}

bool ShiftedSmooth::quadratic_minorant(Vector& anchor, double& offset) const {
  Vector base_anchor;
  double base_offset = 0.0;
  if (!base_->quadratic_minorant(base_anchor, base_offset)) {
    return false;
  }
  // (mu/2)||x - a||^2 + (kappa/2)||x - y||^2
  //   = ((mu + kappa)/2) ||x - (mu a + kappa y)/(mu + kappa)||^2 + const.
  const double mu = base_->strong_convexity();
  const double mu_shift = mu + kappa_;
  anchor = (mu * base_anchor + kappa_ * center_) / mu_shift;
  offset = base_offset + 0.5 * (mu * base_anchor.squaredNorm() +
                                kappa_ * center_.squaredNorm() -
                                mu_shift * anchor.squaredNorm());
  return true;
}

void ShiftedSmooth::hessian(const Vector& x, Matrix& h) const {
  base_->hessian(x, h);
  h.diagonal().array() += kappa_;
}

CompositeObjective shift(const CompositeObjective& base, double kappa, Vector center) {
  return CompositeObjective{
      std::make_shared<ShiftedSmooth>(base.smooth, kappa, std::move(center)),
      base.psi};
}

}  // namespace catalyst

// Composite objectives F(x) = (1/n) sum_i f_i(x) + psi(x): a smooth finite
// sum with per-component value/gradient oracles plus a separable regularizer
// with a closed-form proximal operator, and the proximal-point shift
// F + (kappa/2)||x - center||^2 used by the acceleration outer loop.
#pragma once

#include <memory>

#include "catalyst/dataset.hpp"
#include "catalyst/types.hpp"

namespace catalyst {

// Stable log(1 + exp(-m)).
double logistic_loss(double margin);
// Stable 1 / (1 + exp(-t)).
double sigmoid(double t);

// Separable regularizer psi(x) = l1 * ||x||_1 + (l2 / 2) * ||x||^2.  The two
// weights cover the none / l1 / squared l2 / elastic net cases.
class Regularizer {
 public:
  Regularizer() = default;

  static Regularizer none() { return {}; }
  static Regularizer l1(double weight);
  static Regularizer squared_l2(double weight);
  static Regularizer elastic_net(double l1_weight, double l2_weight);

  double l1_weight() const { return l1_; }
  double l2_weight() const { return l2_; }
  bool is_zero() const { return l1_ == 0.0 && l2_ == 0.0; }

  double value(const Vector& x) const;

  // out = argmin_y { step * psi(y) + 0.5 ||y - z||^2 }: componentwise
  // soft-threshold by step*l1 then shrink by 1/(1 + step*l2).
  void prox(double step, const Vector& z, Vector& out) const;
  Vector prox(double step, const Vector& z) const;

 private:
  Regularizer(double l1, double l2) : l1_(l1), l2_(l2) {}
  double l1_ = 0.0;
  double l2_ = 0.0;
};

// Smooth finite sum f(x) = (1/n) sum_i f_i(x).  Every component has an
// `lipschitz()`-Lipschitz gradient and is `strong_convexity()`-strongly
// convex (0 when merely convex).
class SmoothSum {
 public:
  virtual ~SmoothSum() = default;

  virtual int components() const = 0;
  virtual int dim() const = 0;
  virtual double lipschitz() const = 0;
  virtual double strong_convexity() const = 0;

  virtual double component_value(int i, const Vector& x) const = 0;
  // g = grad f_i(x); g is resized/overwritten.
  virtual void component_gradient(int i, const Vector& x, Vector& g) const = 0;

  // Defaults average the components in index order; subclasses may override
  // with something faster as long as the result agrees to rounding error.
  virtual double value(const Vector& x) const;
  virtual void gradient(const Vector& x, Vector& g) const;

  // Uniform quadratic minorant: if true, every component satisfies
  // f_i(x) >= offset + (strong_convexity()/2) ||x - anchor||^2.  Holds for
  // nonnegative losses with an l2 term folded in (anchor 0, offset 0) and is
  // preserved under proximal-point shifts; enables anchor-based solver
  // initialization without a data pass.
  virtual bool quadratic_minorant(Vector& anchor, double& offset) const;

  // Optional second-order oracle for reference solvers.
  virtual bool has_hessian() const { return false; }
  virtual void hessian(const Vector& x, Matrix& h) const;
};

// l2-regularized logistic loss over a labeled dataset:
//   f_i(x) = log(1 + exp(-b_i <a_i, x>)) + (ridge / 2) ||x||^2.
// Gradient Lipschitz constant: 0.25 * max_i ||a_i||^2 + ridge.
class LogisticSum final : public SmoothSum {
 public:
  LogisticSum(std::shared_ptr<const LabeledDataset> data, double ridge);

  int components() const override { return data_->num_samples(); }
  int dim() const override { return data_->num_features(); }
  double lipschitz() const override { return lipschitz_; }
  double strong_convexity() const override { return ridge_; }
  double component_value(int i, const Vector& x) const override;
  void component_gradient(int i, const Vector& x, Vector& g) const override;
  double value(const Vector& x) const override;
  void gradient(const Vector& x, Vector& g) const override;
  bool quadratic_minorant(Vector& anchor, double& offset) const override;
  bool has_hessian() const override { return true; }
  void hessian(const Vector& x, Matrix& h) const override;

  const LabeledDataset& data() const { return *data_; }
  double ridge() const { return ridge_; }

 private:
  std::shared_ptr<const LabeledDataset> data_;
  double ridge_ = 0.0;
  double lipschitz_ = 0.0;
};

// Diagonal quadratic sum f_i(x) = 0.5 (x - c_i)' diag(d) (x - c_i) with the
// closed-form minimizer at the centroid of the centers; used by exactness
// tests.
class QuadraticSum final : public SmoothSum {
 public:
  // centers: one row per component (n x p); curvature d > 0 elementwise.
  QuadraticSum(Matrix centers, Vector curvature);

  int components() const override { return static_cast<int>(centers_.rows()); }
  int dim() const override { return static_cast<int>(centers_.cols()); }
  double lipschitz() const override { return curvature_.maxCoeff(); }
  double strong_convexity() const override { return curvature_.minCoeff(); }
  double component_value(int i, const Vector& x) const override;
  void component_gradient(int i, const Vector& x, Vector& g) const override;
  bool has_hessian() const override { return true; }
  void hessian(const Vector& x, Matrix& h) const override;

  // argmin of the sum (psi = 0): the centroid of the centers.
  Vector minimizer() const { return centers_.colwise().mean(); }

 private:
  Matrix centers_;
  Vector curvature_;
};

// View of a base sum with (kappa/2) ||x - center||^2 added to every
// component; shares the base storage.
class ShiftedSmooth final : public SmoothSum {
 public:
  ShiftedSmooth(std::shared_ptr<const SmoothSum> base, double kappa, Vector center);

  int components() const override { return base_->components(); }
  int dim() const override { return base_->dim(); }
  double lipschitz() const override { return base_->lipschitz() + kappa_; }
  double strong_convexity() const override { return base_->strong_convexity() + kappa_; }
  double component_value(int i, const Vector& x) const override;
  void component_gradient(int i, const Vector& x, Vector& g) const override;
  double value(const Vector& x) const override;
  void gradient(const Vector& x, Vector& g) const override;
  bool quadratic_minorant(Vector& anchor, double& offset) const override;
  bool has_hessian() const override { return base_->has_hessian(); }
  void hessian(const Vector& x, Matrix& h) const override;

  double kappa() const { return kappa_; }
  const Vector& center() const { return center_; }

 private:
  std::shared_ptr<const SmoothSum> base_;
  double kappa_ = 0.0;
  Vector center_;
};

// F = smooth + psi.
struct CompositeObjective {
  std::shared_ptr<const SmoothSum> smooth;
  Regularizer psi;

  int dim() const { return smooth->dim(); }
  int components() const { return smooth->components(); }
  double value(const Vector& x) const { return smooth->value(x) + psi.value(x); }

  // Lipschitz constant of the smooth part (the prox handles psi exactly).
  double smooth_lipschitz() const { return smooth->lipschitz(); }
  // Strong convexity of F as a whole.
  double strong_convexity() const { return smooth->strong_convexity() + psi.l2_weight(); }
  // Strong convexity of each smooth component (what incremental lower-bound
  // methods rely on).
  double component_strong_convexity() const { return smooth->strong_convexity(); }
};

// G(x) = F(x) + (kappa/2) ||x - center||^2 as a composite objective; the
// quadratic is folded into the smooth components, psi is unchanged, and no
// data is copied.  Requires kappa > 0.
CompositeObjective shift(const CompositeObjective& base, double kappa, Vector center);

}  // namespace catalyst

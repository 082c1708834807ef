#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hanzi/matrix.hpp"

namespace hanzi {

struct LogRegOptions {
  double l2_c = 1.0;              ///< inverse regularization strength
  std::size_t max_iterations = 1000;
  double gradient_tolerance = 1e-6;
};

/// One-vs-rest L2-regularized logistic regression. Class k's binary model
/// minimizes
///   (1/n) sum_i log(1 + exp(-y_i (w.x_i + b))) + |w|^2 / (2 C n)
/// with y_i = +1 for class k and -1 otherwise; the bias is not regularized.
class LogRegModel {
 public:
  LogRegModel(Matrix weights, std::vector<double> bias, double l2_c);

  std::size_t num_classes() const noexcept { return bias_.size(); }
  std::size_t dim() const noexcept { return weights_.cols(); }
  const Matrix& weights() const noexcept { return weights_; }
  std::span<const double> bias() const noexcept { return bias_; }
  double l2_c() const noexcept { return l2_c_; }

  /// Per-class scores w_k.x + b_k.
  std::vector<double> decision_function(std::span<const double> x) const;
  /// Per-class sigmoid outputs normalized to sum to one.
  std::vector<double> predict_proba(std::span<const double> x) const;
  std::size_t predict(std::span<const double> x) const;

 private:
  Matrix weights_;
  std::vector<double> bias_;
  double l2_c_;
};

/// Full-batch gradient descent with backtracking line search, stopping at
/// gradient norm below the tolerance or after max_iterations. Deterministic.
/// `labels[i]` must be below `num_classes`; throws Error when fewer than two
/// distinct classes occur.
LogRegModel train_logreg(const Matrix& features, std::span<const std::size_t> labels,
                         std::size_t num_classes, const LogRegOptions& options = {});

}  // namespace hanzi

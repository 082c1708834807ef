#include "hanzi/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hanzi/error.hpp"

namespace hanzi {
namespace {

// log(1 + exp(-m)) computed stably.
double logistic_loss(double margin) {
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Parameters of one binary problem: dim weights followed by the bias.
class BinaryObjective {
 public:
  BinaryObjective(const Matrix& x, std::vector<double> y, double l2_c)
      : x_(x), y_(std::move(y)), reg_(1.0 / (l2_c * static_cast<double>(x.rows()))) {}

  double value(std::span<const double> theta) const {
    const std::size_t d = x_.cols();
    const auto w = theta.first(d);
    double loss = 0.0;
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      loss += logistic_loss(y_[i] * (dot(w, x_.row(i)) + theta[d]));
    }
    return loss / static_cast<double>(x_.rows()) + 0.5 * reg_ * dot(w, w);
  }

  void gradient(std::span<const double> theta, std::span<double> grad) const {
    const std::size_t d = x_.cols();
    const auto w = theta.first(d);
    std::fill(grad.begin(), grad.end(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      const double margin = y_[i] * (dot(w, x_.row(i)) + theta[d]);
      const double g = -y_[i] * sigmoid(-margin) * inv_n;
      axpy(g, x_.row(i), grad.first(d));
      grad[d] += g;
    }
    axpy(reg_, w, grad.first(d));
  }

 private:
  const Matrix& x_;
  std::vector<double> y_;
  double reg_;
};

std::vector<double> minimize(const BinaryObjective& f, std::size_t params,
                             const LogRegOptions& options) {
  std::vector<double> theta(params, 0.0);
  std::vector<double> grad(params);
  std::vector<double> trial(params);
  double value = f.value(theta);
  double step = 1.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    f.gradient(theta, grad);
    const double gg = dot(grad, grad);
    if (std::sqrt(gg) < options.gradient_tolerance) break;
    // Armijo backtracking, starting from a modest increase of the last step.
    step = std::min(step * 2.0, 1e6);
    double trial_value = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t j = 0; j < params; ++j) trial[j] = theta[j] - step * grad[j];
      trial_value = f.value(trial);
      if (trial_value <= value - 0.5 * step * gg) break;
      step *= 0.5;
    }
    if (!(trial_value < value)) break;  // no further progress representable
    theta.swap(trial);
    value = trial_value;
  }
  return theta;
}

}  // namespace

LogRegModel::LogRegModel(Matrix weights, std::vector<double> bias, double l2_c)
    : weights_(std::move(weights)), bias_(std::move(bias)), l2_c_(l2_c) {
  if (weights_.rows() != bias_.size()) throw Error("weights and bias differ in class count");
}

std::vector<double> LogRegModel::decision_function(std::span<const double> x) const {
  if (x.size() != dim()) throw Error("feature dimension does not match the model");
  std::vector<double> scores(num_classes());
  for (std::size_t k = 0; k < num_classes(); ++k) {
    scores[k] = dot(weights_.row(k), x) + bias_[k];
  }
  return scores;
}

std::vector<double> LogRegModel::predict_proba(std::span<const double> x) const {
  auto p = decision_function(x);
  double total = 0.0;
  for (auto& v : p) {
    v = sigmoid(v);
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

std::size_t LogRegModel::predict(std::span<const double> x) const {
  const auto scores = decision_function(x);
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                  scores.begin());
}

LogRegModel train_logreg(const Matrix& features, std::span<const std::size_t> labels,
                         std::size_t num_classes, const LogRegOptions& options) {
  if (features.rows() != labels.size()) throw Error("features and labels differ in count");
  if (!(options.l2_c > 0.0)) throw Error("l2_c must be positive");
  std::set<std::size_t> seen;
  for (auto l : labels) {
    if (l >= num_classes) throw Error("label outside the class range");
    seen.insert(l);
  }
  if (seen.size() < 2) throw Error("logistic regression needs at least two classes");

  const std::size_t d = features.cols();
  Matrix weights(num_classes, d);
  std::vector<double> bias(num_classes, 0.0);
  for (std::size_t k = 0; k < num_classes; ++k) {
    std::vector<double> y(labels.size());
    std::transform(labels.begin(), labels.end(), y.begin(),
                   [k](std::size_t l) { return l == k ? 1.0 : -1.0; });
    const BinaryObjective objective(features, std::move(y), options.l2_c);
    const auto theta = minimize(objective, d + 1, options);
    std::copy_n(theta.begin(), d, weights.row(k).begin());
    bias[k] = theta[d];
  }
  return LogRegModel(std::move(weights), std::move(bias), options.l2_c);
}

}  // namespace hanzi

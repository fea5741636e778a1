#include "hypermult/elastic_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypermult/error.hpp"

namespace hypermult::elastic_net {
namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double margin(std::span<const double> row, std::span<const double> w, double b) {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += row[j] * w[j];
  return z;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double l1(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return s;
}

void check(const Problem& problem, std::span<const double> w) {
  if (problem.x.rows() != problem.y.size() || problem.x.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "elastic net: rows and labels differ or are empty");
  }
  if (w.size() != problem.x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "elastic net: weight vector has wrong length");
  }
}

}  // namespace

double smooth_objective(const Problem& problem, std::span<const double> w, double b) {
  check(problem, w);
  const std::size_t n = problem.x.rows();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = margin(problem.x.row(i), w, b);
    loss += softplus(z) - (problem.y[i] ? z : 0.0);
  }
  double ridge = 0.0;
  for (double v : w) ridge += v * v;
  return loss / static_cast<double>(n) + 0.5 * problem.lambda * (1.0 - problem.alpha) * ridge;
}

double smooth_gradient(const Problem& problem, std::span<const double> w, double b,
                       std::span<double> grad_w) {
  check(problem, w);
  const std::size_t n = problem.x.rows();
  const std::size_t p = w.size();
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  double grad_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = problem.x.row(i);
    const double r = sigmoid(margin(row, w, b)) - (problem.y[i] ? 1.0 : 0.0);
    for (std::size_t j = 0; j < p; ++j) grad_w[j] += r * row[j];
    grad_b += r;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double ridge = problem.lambda * (1.0 - problem.alpha);
  for (std::size_t j = 0; j < p; ++j) grad_w[j] = grad_w[j] * inv_n + ridge * w[j];
  return grad_b * inv_n;
}

double objective(const Problem& problem, std::span<const double> w, double b) {
  return smooth_objective(problem, w, b) + problem.lambda * problem.alpha * l1(w);
}

Fit solve(const Problem& problem, const Options& options) {
  const std::size_t n = problem.x.rows();
  const std::size_t p = problem.x.cols();
  if (!(problem.lambda >= 0.0) || !(problem.alpha >= 0.0 && problem.alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "elastic net: need lambda >= 0 and alpha in [0,1]");
  }

  Fit fit;
  fit.weights.assign(p, 0.0);
  std::size_t positives = 0;
  for (Label y : problem.y) positives += y != 0;
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "elastic net: no rows");
  // Start from the intercept-only optimum when it is finite.
  if (positives > 0 && positives < n) {
    const double rate = static_cast<double>(positives) / static_cast<double>(n);
    fit.intercept = std::log(rate / (1.0 - rate));
  }

  // Frobenius bound on the Lipschitz constant of the smooth gradient.
  double frob = 0.0;
  for (double v : problem.x.data()) frob += v * v;
  const double lipschitz = 0.25 * (frob / static_cast<double>(n) + 1.0) +
                           problem.lambda * (1.0 - problem.alpha);
  double step = 1.0 / lipschitz;
  const double l1_weight = problem.lambda * problem.alpha;

  std::vector<double> grad(p);
  std::vector<double> w_next(p);
  double f = smooth_objective(problem, fit.weights, fit.intercept);
  double full = f + l1_weight * l1(fit.weights);

  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    const double grad_b = smooth_gradient(problem, fit.weights, fit.intercept, grad);

    double f_next = 0.0;
    double b_next = 0.0;
    double dist2 = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      double lin = 0.0;
      dist2 = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        w_next[j] = soft_threshold(fit.weights[j] - step * grad[j], step * l1_weight);
        const double d = w_next[j] - fit.weights[j];
        lin += grad[j] * d;
        dist2 += d * d;
      }
      b_next = fit.intercept - step * grad_b;
      const double db = b_next - fit.intercept;
      lin += grad_b * db;
      dist2 += db * db;
      f_next = smooth_objective(problem, w_next, b_next);
      if (f_next <= f + lin + dist2 / (2.0 * step)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    fit.gradient_mapping_norm = std::sqrt(dist2) / step;
    const double full_next = f_next + l1_weight * l1(w_next);
    // Rounding can break the exact descent guarantee at machine precision;
    // such a step is dropped so the objective stays monotone. When the
    // predicted decrease is below the objective's resolution no further
    // progress is measurable, which counts as converged.
    if (!accepted || full_next > full) {
      const double resolution = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(full));
      fit.converged = fit.gradient_mapping_norm <= options.tolerance || dist2 / (2.0 * step) <= resolution;
      break;
    }
    fit.weights.swap(w_next);
    fit.intercept = b_next;
    f = f_next;
    full = full_next;
    if (options.record_objective) fit.objective_trace.push_back(full);
    if (fit.gradient_mapping_norm <= options.tolerance) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
    step *= 1.5;
  }
  return fit;
}

}  // namespace hypermult::elastic_net

#pragma once

#include <span>
#include <vector>

#include "hypermult/datasets.hpp"

namespace hypermult::elastic_net {

/// Penalized logistic regression problem on (already standardized) features:
///
///   F(w, b) = 1/n sum_i [log(1 + exp(z_i)) - y_i z_i]        z_i = x_i.w + b
///             + lambda * (1 - alpha) / 2 * |w|_2^2            (smooth part)
///             + lambda * alpha * |w|_1                        (prox part)
///
/// The intercept b is never penalized.
struct Problem {
  const Matrix& x;
  std::span<const Label> y;
  double lambda = 0.0;
  double alpha = 1.0;
};

struct Options {
  double tolerance = 1e-6;  // on the gradient-mapping norm
  std::size_t max_iterations = 10000;
  bool record_objective = false;
};

struct Fit {
  std::vector<double> weights;
  double intercept = 0.0;
  std::size_t iterations = 0;
  double gradient_mapping_norm = 0.0;
  bool converged = false;
  /// Full objective F after each accepted step (only when requested).
  std::vector<double> objective_trace;
};

double smooth_objective(const Problem& problem, std::span<const double> w, double b);
/// Gradient of the smooth part; `grad_w` must have p entries.
double smooth_gradient(const Problem& problem, std::span<const double> w, double b,
                       std::span<double> grad_w);
double objective(const Problem& problem, std::span<const double> w, double b);

/// Proximal gradient descent with backtracking. Each accepted step satisfies
/// the quadratic upper bound, so F never increases. Runs until the
/// gradient-mapping norm drops below the tolerance; on hitting the iteration
/// cap it returns the last iterate with converged = false.
Fit solve(const Problem& problem, const Options& options = {});

}  // namespace hypermult::elastic_net

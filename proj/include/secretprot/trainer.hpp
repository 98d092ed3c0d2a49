// Desk-scale DP-SGD with per-example Poisson sampling over a pluggable
// differentiable model, plus a synthetic dataset generator with planted
// power-law secrets.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "secretprot/domain.hpp"
#include "secretprot/pipeline.hpp"

namespace secretprot {

struct ModelAdapter {
  std::vector<double> theta;
  // gradient of the per-example loss at theta; same dimension as theta
  std::function<std::vector<double>(const std::vector<double>& theta,
                                    const std::vector<double>& payload)>
      loss_grad;
  std::function<double(const std::vector<double>& theta,
                       const std::vector<double>& payload)>
      loss_value;
  // first-order step, e.g. SGD: theta -= lr * g
  std::function<void(std::vector<double>& theta, const std::vector<double>& g,
                     double lr)>
      update;
};

struct TrainTrace {
  std::vector<int> batch_sizes;       // realized per-round Poisson batch sizes
  std::vector<double> grad_norms;     // pre-noise norm of the scaled sum
  std::vector<double> round_losses;   // full-data loss after each update
  std::vector<double> theta;
  double eval_loss = 0.0;
};

// [v]_C = v * min(1, C / ||v||_2)
std::vector<double> clip(std::vector<double> v, double C);

// Linear regression on payload = features ++ target, squared loss.
ModelAdapter linear_regression_model(int dim);
// Logistic regression on the same payload layout, target thresholded at 0.
ModelAdapter logistic_regression_model(int dim);

TrainTrace train(const SecretMap& map, const SamplingPlan& plan,
                 ModelAdapter& model, const RunConfig& config,
                 std::uint64_t rng_seed, double learning_rate);

// n regression examples, m secrets whose incidence sizes follow a power law
// with exponent skew; targets use p = 1e-10 and r uniform in [2e-4, 1e-3].
SecretMap make_synthetic(int n, int m, double skew, int dim,
                         std::uint64_t seed);

}  // namespace secretprot

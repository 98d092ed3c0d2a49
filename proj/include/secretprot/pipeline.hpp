// End-to-end calibration: KL budgets -> LP weights -> sampling
// probabilities -> per-secret minimal noise -> global noise multiplier,
// plus the achieved-posterior report.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secretprot/domain.hpp"
#include "secretprot/lp.hpp"

namespace secretprot {

struct SamplingPlan {
  WeightVector weights;
  std::vector<double> probs;  // rho_i = B w_i / sum w
  double batch_target = 0.0;
  long rounds = 0;
  double sigma = 0.0;
};

struct SecretCalibration {
  std::string secret_id;
  double mu = 0.0;           // KL budget
  double sigma_j = 0.0;      // minimal noise for this secret alone
  double achieved_kl = 0.0;  // at the final global sigma
  double achieved_posterior = 0.0;
  double target_posterior = 0.0;
  bool vacuous = false;  // empty group, all-zero probs, or r = 1
};

struct CalibrationReport {
  std::vector<SecretCalibration> secrets;
  double sigma = 0.0;
  double fraction_retained = 0.0;  // sum w_i / n
};

// rho_i = B w_i / sum w. Errors unless max_i w_i <= sum w / B (otherwise
// some rho_i would exceed 1; reduce B).
std::vector<double> sampling_probs(const WeightVector& weights, double B);

// Minimal sigma with composed KL of the group mechanism <= mu, located by
// doubling/halving from 1e-3 then bisection to relative tolerance rel_tol.
// Returns 0 for vacuous groups (empty or all-zero probabilities).
double calibrate_secret_sigma(std::span<const double> group_probs, long rounds,
                              double mu, double rel_tol = 1e-4);

std::pair<SamplingPlan, CalibrationReport> calibrate(const SecretMap& map,
                                                     const RunConfig& config);

}  // namespace secretprot

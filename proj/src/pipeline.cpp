#include "secretprot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "secretprot/accountant.hpp"
#include "secretprot/divergence.hpp"

namespace secretprot {

std::vector<double> sampling_probs(const WeightVector& weights, double B) {
  if (!(B > 0.0)) throw std::invalid_argument("batch target must be > 0");
  double sum = 0.0, wmax = 0.0;
  for (double w : weights.w) {
    sum += w;
    wmax = std::max(wmax, w);
  }
  if (sum <= 0.0)
    throw std::invalid_argument("sampling_probs: all weights are zero");
  if (B * wmax > sum * (1.0 + 1e-12))
    throw std::invalid_argument(
        "sampling_probs: max weight exceeds sum(w)/B, some probability would "
        "exceed 1; reduce the batch target");
  std::vector<double> rho(weights.w.size());
  for (size_t i = 0; i < rho.size(); ++i)
    rho[i] = std::min(1.0, B * weights.w[i] / sum);
  return rho;
}

double calibrate_secret_sigma(std::span<const double> group_probs, long rounds,
                              double mu, double rel_tol) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
  bool vacuous = true;
  for (double p : group_probs)
    if (p > 0.0) vacuous = false;
  if (group_probs.empty() || vacuous) return 0.0;
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");

  DiscretePMF pmf = poisson_binomial(group_probs);
  auto kl = [&](double sigma) {
    return composed_kl(RoundMechanism{pmf, sigma}, rounds);
  };

  // bracket [lo, hi] with kl(lo) > mu >= kl(hi); kl is decreasing in sigma
  double lo, hi = 1e-3;
  if (kl(hi) > mu) {
    do {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12)
        throw std::runtime_error("calibrate_secret_sigma: no sigma meets mu");
    } while (kl(hi) > mu);
  } else {
    do {
      lo = hi / 2.0;
      if (lo < 1e-12) return hi;  // budget met by vanishing noise
      if (kl(lo) > mu) break;
      hi = lo;
    } while (true);
  }

  while (hi - lo > rel_tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (kl(mid) > mu)
      lo = mid;
    else
      hi = mid;
  }
  return hi;  // safe side: kl(hi) <= mu
}

std::pair<SamplingPlan, CalibrationReport> calibrate(const SecretMap& map,
                                                     const RunConfig& config) {
  const SecretMap working =
      config.drop_secretless ? filter_secretless(map) : map;

  std::vector<KLBudget> budgets;
  budgets.reserve(working.secrets.size());
  for (const auto& s : working.secrets) budgets.push_back(budget_from_targets(s));

  WeightLP lp = build_lp(working, budgets, config.lp_constant);
  WeightVector weights = solve(lp);
  std::vector<double> probs = sampling_probs(weights, config.batch_target);

  CalibrationReport report;
  report.fraction_retained =
      working.examples.empty() ? 0.0
                               : weights.objective /
                                     static_cast<double>(working.examples.size());

  // identical (group, mu) pairs resolve to the same sigma; solve each once
  std::map<std::pair<std::vector<double>, double>, double> cache;
  std::vector<std::vector<double>> groups(working.secrets.size());
  for (size_t j = 0; j < working.secrets.size(); ++j) {
    for (int i : working.incidence[j]) groups[j].push_back(probs[i]);

    const SecretSpec& spec = working.secrets[j];
    SecretCalibration cal;
    cal.secret_id = spec.id;
    cal.mu = budgets[j].mu;
    cal.target_posterior = spec.posterior_r;
    cal.vacuous = spec.posterior_r >= 1.0 ||
                  std::all_of(groups[j].begin(), groups[j].end(),
                              [](double p) { return p == 0.0; });
    if (!cal.vacuous) {
      std::vector<double> key = groups[j];
      std::sort(key.begin(), key.end());
      auto [it, fresh] = cache.try_emplace({std::move(key), cal.mu}, 0.0);
      if (fresh)
        it->second = calibrate_secret_sigma(groups[j], config.rounds, cal.mu);
      cal.sigma_j = it->second;
    }
    report.secrets.push_back(std::move(cal));
  }

  double sigma = 0.0;
  for (const auto& cal : report.secrets) sigma = std::max(sigma, cal.sigma_j);
  report.sigma = sigma;

  // achieved guarantees are reported at the deployed (global) sigma
  for (size_t j = 0; j < report.secrets.size(); ++j) {
    SecretCalibration& cal = report.secrets[j];
    if (!cal.vacuous && sigma > 0.0)
      cal.achieved_kl =
          composed_kl(RoundMechanism{poisson_binomial(groups[j]), sigma},
                      config.rounds);
    cal.achieved_posterior =
        invert_posterior(working.secrets[j].prior_p, cal.achieved_kl);
  }

  SamplingPlan plan{std::move(weights), std::move(probs), config.batch_target,
                    config.rounds, sigma};
  return {std::move(plan), std::move(report)};
}

}  // namespace secretprot

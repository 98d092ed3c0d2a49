#include "secretprot/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "secretprot/accountant.hpp"
#include "secretprot/divergence.hpp"
#include "secretprot/rng.hpp"

namespace secretprot {
namespace {

void validate(const ReconstructionGame& game) {
  if (game.k < 2 || static_cast<size_t>(game.k) != game.prior.size())
    throw std::invalid_argument("prior must cover k >= 2 candidates");
  double total = 0.0;
  for (double p : game.prior) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative prior entry");
    if (p > game.prior_cap + 1e-12)
      throw std::invalid_argument("prior entry exceeds the cap p");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("prior does not sum to 1");
  if (!(game.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (game.rounds < 1 || game.trials < 1)
    throw std::invalid_argument("rounds and trials must be >= 1");
}

}  // namespace

double certified_bound(double p, std::span<const double> group_probs,
                       double sigma, long rounds) {
  double kl = composed_kl(
      RoundMechanism{poisson_binomial(group_probs), sigma}, rounds);
  return invert_posterior(p, kl);
}

GameResult simulate_game(const ReconstructionGame& game, std::uint64_t seed) {
  validate(game);
  const int k = game.k;
  const double sigma = game.sigma;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

  // shift law of the candidate's coordinate; negligible entries dropped
  DiscretePMF pmf = poisson_binomial(game.group_probs);
  std::vector<double> shifts, log_w;
  for (size_t s = 0; s < pmf.probs.size(); ++s) {
    if (pmf.probs[s] > 1e-18) {
      shifts.push_back(static_cast<double>(s));
      log_w.push_back(std::log(pmf.probs[s]));
    }
  }

  std::vector<double> cdf(game.prior.size());
  double acc = 0.0;
  for (size_t i = 0; i < game.prior.size(); ++i) {
    acc += game.prior[i];
    cdf[i] = acc;
  }

  // log-likelihood ratio contribution of observing y on one candidate
  // coordinate: ln sum_s w_s exp((2 s y - s^2) / (2 sigma^2))
  auto loglr = [&](double y) {
    double m = -1e300;
    for (size_t s = 0; s < shifts.size(); ++s)
      m = std::max(m, log_w[s] +
                          (2.0 * shifts[s] * y - shifts[s] * shifts[s]) * inv2s2);
    double sum = 0.0;
    for (size_t s = 0; s < shifts.size(); ++s)
      sum += std::exp(log_w[s] +
                      (2.0 * shifts[s] * y - shifts[s] * shifts[s]) * inv2s2 -
                      m);
    return m + std::log(sum);
  };

  long bayes_hits = 0, plugin_hits = 0;
  std::vector<double> lambda(k), mean_stat(k);
  for (long trial = 0; trial < game.trials; ++trial) {
    CounterRng rng(seed, static_cast<std::uint64_t>(trial) + 1);
    double u = rng.uniform();
    int truth = static_cast<int>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (truth >= k) truth = k - 1;

    for (int j = 0; j < k; ++j) {
      lambda[j] = game.prior[j] > 0.0 ? std::log(game.prior[j]) : -1e300;
      mean_stat[j] = 0.0;
    }
    for (long t = 0; t < game.rounds; ++t) {
      double shift = 0.0;
      for (double rho : game.group_probs)
        if (rng.uniform() < rho) shift += 1.0;
      for (int j = 0; j < k; ++j) {
        double y = (j == truth ? shift : 0.0) + sigma * rng.gaussian();
        lambda[j] += loglr(y);
        mean_stat[j] += y;
      }
    }
    int bayes_guess = static_cast<int>(
        std::max_element(lambda.begin(), lambda.end()) - lambda.begin());
    int plugin_guess = static_cast<int>(
        std::max_element(mean_stat.begin(), mean_stat.end()) -
        mean_stat.begin());
    if (bayes_guess == truth) ++bayes_hits;
    if (plugin_guess == truth) ++plugin_hits;
  }

  GameResult result;
  result.empirical_success =
      static_cast<double>(bayes_hits) / static_cast<double>(game.trials);
  result.plugin_success =
      static_cast<double>(plugin_hits) / static_cast<double>(game.trials);
  result.stderr_ = std::sqrt(result.empirical_success *
                             (1.0 - result.empirical_success) /
                             static_cast<double>(game.trials));
  result.certified_bound =
      certified_bound(game.prior_cap, game.group_probs, sigma, game.rounds);
  return result;
}

}  // namespace secretprot

// Monte-Carlo reconstruction game: a Bayes-optimal adversary guesses which
// of k candidate inputs produced the mechanism output; empirical success is
// compared against the KL-certified posterior bound.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace secretprot {

struct ReconstructionGame {
  int k = 0;                        // number of candidate inputs
  double prior_cap = 0.0;           // p: max prior mass per candidate
  std::vector<double> prior;        // distribution over [k], entries <= prior_cap
  std::vector<double> group_probs;  // sampling probs of the secret's examples
  double sigma = 0.0;
  long rounds = 0;
  long trials = 0;
};

struct GameResult {
  double empirical_success = 0.0;
  double stderr_ = 0.0;  // sqrt(s(1-s)/trials)
  double certified_bound = 0.0;
  double plugin_success = 0.0;  // nearest-mean comparison adversary
};

GameResult simulate_game(const ReconstructionGame& game, std::uint64_t seed);

// invert_posterior(p, composed KL of the group mechanism over T rounds)
double certified_bound(double p, std::span<const double> group_probs,
                       double sigma, long rounds);

}  // namespace secretprot

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "secretprot/attack.hpp"
#include "secretprot/divergence.hpp"
#include "secretprot/pipeline.hpp"

using namespace secretprot;

namespace {

ReconstructionGame uniform_game(int k, double p, std::vector<double> group,
                                double sigma, long rounds, long trials) {
  ReconstructionGame game;
  game.k = k;
  game.prior_cap = p;
  game.prior.assign(k, 1.0 / static_cast<double>(k));
  game.group_probs = std::move(group);
  game.sigma = sigma;
  game.rounds = rounds;
  game.trials = trials;
  return game;
}

}  // namespace

TEST_CASE("huge noise leaves the adversary at the prior") {
  auto game = uniform_game(8, 0.125, {1.0}, 1e6, 1, 20000);
  GameResult r = simulate_game(game, 1);
  CHECK(std::abs(r.empirical_success - 0.125) <=
        3.0 * std::sqrt(0.125 * 0.875 / 20000.0));
}

TEST_CASE("vanishing noise separates candidates perfectly") {
  auto game = uniform_game(8, 0.125, {1.0}, 1e-6, 1, 5000);
  GameResult r = simulate_game(game, 2);
  CHECK(r.empirical_success == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("empirical success never beats the certified bound") {
  for (double target_r : {0.3, 0.5}) {
    double p = 0.1;
    double sigma =
        calibrate_secret_sigma(std::vector<double>{0.6, 0.4}, 3,
                               bern_kl(target_r, p));
    auto game = uniform_game(10, p, {0.6, 0.4}, sigma, 3, 50000);
    GameResult r = simulate_game(game, 3);
    CHECK(r.certified_bound == doctest::Approx(target_r).epsilon(1e-3));
    CHECK(r.empirical_success <= r.certified_bound + 3.0 * r.stderr_);
  }
}

TEST_CASE("exact-posterior adversary dominates the nearest-mean one") {
  auto game = uniform_game(6, 0.2, {0.7, 0.3}, 0.8, 4, 30000);
  GameResult r = simulate_game(game, 4);
  CHECK(r.empirical_success >= r.plugin_success - 3.0 * r.stderr_);
}

TEST_CASE("certified_bound limits") {
  // sigma -> infinity: bound -> p
  CHECK(certified_bound(0.05, std::vector<double>{1.0}, 1e8, 1) ==
        doctest::Approx(0.05).epsilon(1e-4));

  // round-trip with calibrate_secret_sigma
  double p = 0.01, r = 0.2;
  double sigma = std::sqrt(1.0 / (2.0 * bern_kl(r, p)));
  CHECK(certified_bound(p, std::vector<double>{1.0}, sigma, 1) ==
        doctest::Approx(r).epsilon(1e-6));

  // nonincreasing in sigma
  double prev = 1.0;
  for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    double bound = certified_bound(0.02, std::vector<double>{0.5, 0.5}, s, 5);
    CHECK(bound <= prev + 1e-12);
    prev = bound;
  }
}

TEST_CASE("game validation") {
  auto game = uniform_game(4, 0.25, {0.5}, 1.0, 1, 10);
  game.prior = {0.5, 0.5};  // size mismatch with k
  CHECK_THROWS_AS(simulate_game(game, 0), std::invalid_argument);

  game = uniform_game(4, 0.1, {0.5}, 1.0, 1, 10);  // 1/k = 0.25 > cap
  CHECK_THROWS_AS(simulate_game(game, 0), std::invalid_argument);

  game = uniform_game(4, 0.25, {0.5}, 0.0, 1, 10);
  CHECK_THROWS_AS(simulate_game(game, 0), std::invalid_argument);
}

// KL accounting for the subsampled-Gaussian dominating pair
//   P = sum_k w_k N(k, sigma^2),  Q = N(0, sigma^2),
// where w is the Poisson-binomial law of a secret group's sampling
// probabilities, plus a privacy-loss-distribution blow-up diagnostic.
#pragma once

#include <span>
#include <utility>
#include <vector>

namespace secretprot {

// PMF over integer shifts 0..k. Entries nonnegative, sum to 1 within 1e-12.
struct DiscretePMF {
  std::vector<double> probs;
};

struct RoundMechanism {
  DiscretePMF shift_pmf;
  double sigma = 0.0;  // > 0
};

struct PLDDiagnostic {
  double grid_step = 0.0;
  double total_blowup_mass = 0.0;  // sum_i e^{v_i} p_i; 1 when exact
  std::vector<std::pair<double, double>> support;  // (loss v_i, probability p_i)
};

// Law of sum of independent Bernoulli(probs[i]) by iterative convolution.
// Empty input yields the point mass at 0.
DiscretePMF poisson_binomial(std::span<const double> probs);

// KL(P || Q) for one round, by adaptive Simpson quadrature in log-density
// space over the mixture's support, to ~1e-8 relative accuracy.
double round_kl(const RoundMechanism& mech);

// KL between the T-fold product pairs; KL is additive over products.
double composed_kl(const RoundMechanism& mech, long rounds);

// Discretizes the privacy loss ln(P(x)/Q(x)), x ~ P, onto a loss grid of
// width grid_step with pessimistic (upward) rounding, and reports
// sum_i e^{v_i} p_i. For mixture mechanisms with large shifts this mass can
// vastly exceed 1, which is why KL rather than the blow-up function is the
// binding accounting quantity.
PLDDiagnostic pld_blowup_diagnostic(const RoundMechanism& mech,
                                    double grid_step);

}  // namespace secretprot

// Bernoulli KL divergence and the conversion between (prior, posterior)
// reconstruction targets and KL budgets. All divergences are in nats.
#pragma once

#include <string>

#include "secretprot/domain.hpp"

namespace secretprot {

struct KLBudget {
  double mu = 0.0;  // nats; infinite only when posterior_r == 1
  std::string secret_id;
};

// KL(Bern(r) || Bern(p)) with the convention 0 ln 0 = 0.
// Requires p in (0,1); r in [0,1]. Stable for extreme priors (p ~ 1e-10).
double bern_kl(double r, double p);

KLBudget budget_from_targets(const SecretSpec& spec);

// The unique r in [p,1] with bern_kl(r,p) = mu, found by bisection to
// absolute tolerance tol; saturates at 1 when mu >= bern_kl(1,p) = -ln p.
double invert_posterior(double p, double mu, double tol = 1e-12);

}  // namespace secretprot

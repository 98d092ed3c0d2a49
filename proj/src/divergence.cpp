#include "secretprot/divergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace secretprot {

double bern_kl(double r, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("bern_kl: p must be in (0,1)");
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("bern_kl: r must be in [0,1]");
  double kl = 0.0;
  if (r > 0.0) kl += r * (std::log(r) - std::log(p));
  if (r < 1.0) kl += (1.0 - r) * (std::log1p(-r) - std::log1p(-p));
  return kl < 0.0 ? 0.0 : kl;  // clamp rounding noise at r == p
}

KLBudget budget_from_targets(const SecretSpec& spec) {
  return KLBudget{bern_kl(spec.posterior_r, spec.prior_p), spec.id};
}

double invert_posterior(double p, double mu, double tol) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("invert_posterior: p must be in (0,1)");
  if (mu <= 0.0) return p;
  if (mu >= -std::log(p)) return 1.0;  // bern_kl(1, p) = -ln p
  double lo = p, hi = 1.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (bern_kl(mid, p) < mu)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace secretprot

#include "secretprot/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace secretprot {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2*pi)
constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(std::span<const double> terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// log Phi(z) for the standard normal, stable deep into the lower tail.
double log_ndtr(double z) {
  if (z >= -30.0) return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
  double z2 = z * z;
  double series =
      std::log1p(-1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) +
                 105.0 / (z2 * z2 * z2 * z2));
  return -0.5 * z2 - std::log(-z) - kLogSqrt2Pi + series;
}

// log(Phi(b) - Phi(a)) for a < b; a may be -inf.
double log_gauss_mass(double a, double b) {
  if (a == -kInf) return log_ndtr(b);
  if (b <= 0.0) {
    double la = log_ndtr(a), lb = log_ndtr(b);
    return lb + std::log1p(-std::exp(la - lb));
  }
  if (a >= 0.0) {
    double lca = log_ndtr(-a), lcb = log_ndtr(-b);
    return lca + std::log1p(-std::exp(lcb - lca));
  }
  // a < 0 < b: no cancellation, direct evaluation is fine
  double mass = 0.5 * (std::erf(b / std::sqrt(2.0)) - std::erf(a / std::sqrt(2.0)));
  return std::log(mass);
}

struct Component {
  double shift;
  double log_w;
};

// Validates the pmf and drops machine-negligible tail entries, renormalizing
// the kept mass. The dropped mass (< ~1e-15 total) is far below every
// tolerance used downstream.
std::vector<Component> prepare(const RoundMechanism& mech) {
  const auto& probs = mech.shift_pmf.probs;
  if (probs.empty()) throw std::invalid_argument("shift pmf is empty");
  if (!(mech.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative pmf entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("shift pmf does not sum to 1");
  double kept = 0.0;
  for (double p : probs)
    if (p > 1e-18) kept += p;
  std::vector<Component> comps;
  for (size_t k = 0; k < probs.size(); ++k)
    if (probs[k] > 1e-18)
      comps.push_back({static_cast<double>(k), std::log(probs[k] / kept)});
  return comps;
}

struct MixtureDensity {
  std::vector<Component> comps;
  double sigma;
  mutable std::vector<double> scratch;

  double log_p(double x) const {
    scratch.clear();
    double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (const auto& c : comps) {
      double d = x - c.shift;
      scratch.push_back(c.log_w - d * d * inv2s2);
    }
    return logsumexp(scratch) - std::log(sigma) - kLogSqrt2Pi;
  }

  // ln(P(x)/Q(x)) with Q = N(0, sigma^2); monotone nondecreasing in x.
  double loss(double x) const {
    scratch.clear();
    double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (const auto& c : comps)
      scratch.push_back(c.log_w +
                        (2.0 * c.shift * x - c.shift * c.shift) * inv2s2);
    return logsumexp(scratch);
  }
};

struct AdaptiveSimpson {
  const MixtureDensity& density;
  int max_depth = 48;
  bool converged = true;

  double f(double x) const { return std::exp(density.log_p(x)) * density.loss(x); }

  double recurse(double a, double fa, double b, double fb, double m, double fm,
                 double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth >= max_depth) {
      if (depth >= max_depth && std::abs(err) > 1e4 * tol) converged = false;
      return left + right + err / 15.0;
    }
    return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
           recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
  }

  double integrate(double a, double b, double tol) {
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, fa, b, fb, m, fm, whole, tol, 0);
  }
};

// Union of [k - 10 sigma, k + 10 sigma] windows around the mixture
// components, merged; P carries all but ~1e-23 of its mass there.
std::vector<std::pair<double, double>> support_windows(
    const std::vector<Component>& comps, double sigma) {
  std::vector<std::pair<double, double>> raw;
  for (const auto& c : comps)
    raw.emplace_back(c.shift - 10.0 * sigma, c.shift + 10.0 * sigma);
  std::sort(raw.begin(), raw.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& w : raw) {
    if (!merged.empty() && w.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, w.second);
    else
      merged.push_back(w);
  }
  return merged;
}

}  // namespace

DiscretePMF poisson_binomial(std::span<const double> probs) {
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("sampling probability outside [0,1]");
  std::vector<double> pmf{1.0};
  for (double p : probs) {
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (size_t k = 0; k < pmf.size(); ++k) {
      next[k] += pmf[k] * (1.0 - p);
      next[k + 1] += pmf[k] * p;
    }
    pmf = std::move(next);
  }
  return DiscretePMF{std::move(pmf)};
}

double round_kl(const RoundMechanism& mech) {
  auto comps = prepare(mech);
  if (comps.size() == 1 && comps[0].shift == 0.0) return 0.0;
  MixtureDensity density{std::move(comps), mech.sigma, {}};

  auto windows = support_windows(density.comps, mech.sigma);

  // Split each window at the component centers it contains. Every segment
  // then has a density spike at an endpoint, which the Simpson estimate
  // sees; integrating a multi-spike window whole can sample only the flat
  // gaps between spikes and silently return 0.
  std::vector<std::pair<double, double>> segments;
  for (const auto& [a, b] : windows) {
    double prev = a;
    for (const auto& c : density.comps)
      if (c.shift > prev && c.shift < b) {
        segments.emplace_back(prev, c.shift);
        prev = c.shift;
      }
    segments.emplace_back(prev, b);
  }

  AdaptiveSimpson quad{density};

  // Coarse composite pass to fix the absolute tolerance scale.
  double coarse = 0.0;
  for (const auto& [a, b] : segments) {
    const int panels = 256;
    double h = (b - a) / panels;
    double s = quad.f(a) + quad.f(b);
    for (int i = 1; i < panels; ++i)
      s += quad.f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    coarse += s * h / 3.0;
  }
  double tol = 1e-9 * std::max(std::abs(coarse), 1e-12) /
               static_cast<double>(segments.size());

  double kl = 0.0;
  for (const auto& [a, b] : segments) kl += quad.integrate(a, b, tol);
  if (!quad.converged || std::isnan(kl))
    throw std::runtime_error("round_kl: quadrature did not converge");
  return kl < 0.0 ? 0.0 : kl;
}

double composed_kl(const RoundMechanism& mech, long rounds) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  return static_cast<double>(rounds) * round_kl(mech);
}

PLDDiagnostic pld_blowup_diagnostic(const RoundMechanism& mech,
                                    double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
  auto comps = prepare(mech);
  double kmax = 0.0;
  for (const auto& c : comps) kmax = std::max(kmax, c.shift);
  if (kmax == 0.0)
    return PLDDiagnostic{grid_step, 1.0, {{0.0, 1.0}}};  // P = Q
  MixtureDensity density{std::move(comps), mech.sigma, {}};

  const double sigma = mech.sigma;
  // P * e^loss = P^2/Q concentrates on component-pair centers k + k',
  // so the grid must reach past 2 kmax.
  const double x_lo = -12.0 * sigma;
  const double x_hi = 2.0 * kmax + 12.0 * sigma;
  const double v_lo = density.loss(x_lo);
  const double v_hi = density.loss(x_hi);
  double cells_d = std::ceil((v_hi - v_lo) / grid_step);
  if (cells_d > 8e6)
    throw std::invalid_argument(
        "pld_blowup_diagnostic: loss range needs more than 8e6 cells; "
        "increase grid_step");
  long cells = std::max(1L, static_cast<long>(cells_d));

  PLDDiagnostic diag;
  diag.grid_step = grid_step;

  auto cell_mass = [&](double a, double b, double* linear) {
    // log and linear P-mass of (a, b]; a == -inf folds in the lower tail
    std::vector<double> terms;
    for (const auto& c : density.comps) {
      double za = a == -kInf ? -kInf : (a - c.shift) / sigma;
      double zb = (b - c.shift) / sigma;
      terms.push_back(c.log_w + log_gauss_mass(za, zb));
    }
    double lm = logsumexp(terms);
    *linear = std::exp(lm);
    return lm;
  };

  std::vector<double> blowup_terms;
  double x_prev = x_lo;
  double p_sum = 0.0;
  for (long i = 1; i <= cells; ++i) {
    double v_target = i == cells ? v_hi : v_lo + i * grid_step;
    double x_cell = x_hi;
    if (i < cells) {
      double lo = x_prev, hi = x_hi;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi));
           ++it) {
        double mid = 0.5 * (lo + hi);
        if (density.loss(mid) < v_target)
          lo = mid;
        else
          hi = mid;
      }
      x_cell = hi;
    }
    double linear;
    double lm = cell_mass(i == 1 ? -kInf : x_prev, x_cell, &linear);
    // pessimistic: the whole cell is charged the upper loss edge
    double v_cell = i == cells ? v_hi + grid_step : v_target;
    if (lm > -745.0) {
      diag.support.emplace_back(v_cell, linear);
      p_sum += linear;
      blowup_terms.push_back(v_cell + lm);
    }
    x_prev = x_cell;
  }
  // Fold the negligible upper tail into the last cell so masses sum to 1.
  if (!diag.support.empty() && 1.0 - p_sum > 0.0)
    diag.support.back().second += 1.0 - p_sum;

  double lse = logsumexp(blowup_terms);
  diag.total_blowup_mass = lse > 709.0 ? kInf : std::exp(lse);
  return diag;
}

}  // namespace secretprot

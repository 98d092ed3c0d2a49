#include "secretprot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace secretprot {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-10;

// Primal simplex for  max 1'x  s.t. Ax + s = b, x in [0,1], s >= 0,
// where A is a 0/1 incidence matrix given by columns. Nonbasic variables
// sit at a bound; entering choice and ratio ties use Bland's rule.
class BoundedSimplex {
 public:
  BoundedSimplex(int nvars, const std::vector<std::vector<int>>& var_rows,
                 std::vector<double> b)
      : nvars_(nvars),
        nrows_(static_cast<int>(b.size())),
        var_rows_(var_rows),
        xb_(std::move(b)) {
    basis_.resize(nrows_);
    binv_.assign(nrows_, std::vector<double>(nrows_, 0.0));
    for (int r = 0; r < nrows_; ++r) {
      basis_[r] = nvars_ + r;  // slacks
      binv_[r][r] = 1.0;
    }
    in_basis_.assign(nvars_ + nrows_, false);
    at_upper_.assign(nvars_ + nrows_, false);
    for (int r = 0; r < nrows_; ++r) in_basis_[basis_[r]] = true;
  }

  void run() {
    std::vector<double> y(nrows_), u(nrows_);
    for (;;) {
      // y = c_B' Binv
      for (int i = 0; i < nrows_; ++i) {
        double acc = 0.0;
        for (int r = 0; r < nrows_; ++r)
          if (basis_[r] < nvars_) acc += binv_[r][i];
        y[i] = acc;
      }
      int enter = -1;
      double d_enter = 0.0;
      for (int j = 0; j < nvars_ + nrows_; ++j) {
        if (in_basis_[j]) continue;
        double d = (j < nvars_ ? 1.0 : 0.0) - dot_col(y, j);
        if ((!at_upper_[j] && d > kEps) || (at_upper_[j] && d < -kEps)) {
          enter = j;
          d_enter = d;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) return;  // optimal

      double dir = d_enter > 0.0 ? 1.0 : -1.0;
      compute_column(enter, u);

      double t_own = upper(enter);  // distance to the entering var's far bound
      double t_min = kInf;
      int leave = -1;
      bool leave_at_upper = false;
      for (int r = 0; r < nrows_; ++r) {
        double coeff = dir * u[r];
        if (coeff > kEps) {
          double limit = xb_[r] / coeff;
          if (limit < t_min - kEps ||
              (limit < t_min + kEps &&
               (leave < 0 || basis_[r] < basis_[leave]))) {
            t_min = std::max(0.0, limit);
            leave = r;
            leave_at_upper = false;
          }
        } else if (coeff < -kEps) {
          double ub = upper(basis_[r]);
          if (ub == kInf) continue;
          double limit = (ub - xb_[r]) / (-coeff);
          if (limit < t_min - kEps ||
              (limit < t_min + kEps &&
               (leave < 0 || basis_[r] < basis_[leave]))) {
            t_min = std::max(0.0, limit);
            leave = r;
            leave_at_upper = true;
          }
        }
      }

      if (t_own <= t_min) {
        // bound flip, basis unchanged
        for (int r = 0; r < nrows_; ++r) xb_[r] -= dir * t_own * u[r];
        at_upper_[enter] = !at_upper_[enter];
        continue;
      }
      if (leave < 0) throw std::runtime_error("simplex: unbounded LP");

      for (int r = 0; r < nrows_; ++r) xb_[r] -= dir * t_min * u[r];
      double enter_value = (at_upper_[enter] ? upper(enter) : 0.0) + dir * t_min;

      int out = basis_[leave];
      in_basis_[out] = false;
      at_upper_[out] = leave_at_upper;
      in_basis_[enter] = true;
      basis_[leave] = enter;
      xb_[leave] = enter_value;

      double pivot = u[leave];
      for (int i = 0; i < nrows_; ++i) binv_[leave][i] /= pivot;
      for (int r = 0; r < nrows_; ++r) {
        if (r == leave || std::abs(u[r]) < 1e-14) continue;
        double f = u[r];
        for (int i = 0; i < nrows_; ++i) binv_[r][i] -= f * binv_[leave][i];
      }
    }
  }

  double value(int j) const {
    if (in_basis_[j]) {
      for (int r = 0; r < nrows_; ++r)
        if (basis_[r] == j) return xb_[r];
    }
    return at_upper_[j] ? upper(j) : 0.0;
  }

 private:
  double upper(int j) const { return j < nvars_ ? 1.0 : kInf; }

  double dot_col(const std::vector<double>& y, int j) const {
    if (j >= nvars_) return y[j - nvars_];
    double acc = 0.0;
    for (int r : var_rows_[j]) acc += y[r];
    return acc;
  }

  void compute_column(int j, std::vector<double>& u) const {
    if (j >= nvars_) {
      for (int r = 0; r < nrows_; ++r) u[r] = binv_[r][j - nvars_];
      return;
    }
    for (int r = 0; r < nrows_; ++r) {
      double acc = 0.0;
      for (int c : var_rows_[j]) acc += binv_[r][c];
      u[r] = acc;
    }
  }

  int nvars_, nrows_;
  const std::vector<std::vector<int>>& var_rows_;
  std::vector<double> xb_;
  std::vector<int> basis_;
  std::vector<std::vector<double>> binv_;
  std::vector<bool> in_basis_, at_upper_;
};

}  // namespace

WeightLP build_lp(const SecretMap& map, const std::vector<KLBudget>& budgets,
                  double c) {
  if (!(c > 0.0)) throw std::invalid_argument("lp constant must be > 0");
  std::unordered_map<std::string, double> mu;
  for (const auto& b : budgets) mu[b.secret_id] = b.mu;
  WeightLP lp;
  lp.n = static_cast<int>(map.examples.size());
  lp.m = static_cast<int>(map.secrets.size());
  lp.groups = map.incidence;
  for (const auto& s : map.secrets) {
    auto it = mu.find(s.id);
    if (it == mu.end())
      throw std::invalid_argument("missing budget for secret " + s.id);
    lp.caps.push_back(c * it->second);
  }
  return lp;
}

WeightVector solve(const WeightLP& lp) {
  for (double cap : lp.caps)
    if (!(cap >= 0.0)) throw std::invalid_argument("negative capacity");
  for (const auto& g : lp.groups)
    for (int i : g)
      if (i < 0 || i >= lp.n)
        throw std::invalid_argument("incidence index out of range");

  std::vector<double> w(lp.n, -1.0);  // -1: undecided
  // presolve: zero caps pin every incident weight to 0
  for (size_t j = 0; j < lp.groups.size(); ++j)
    if (lp.caps[j] == 0.0)
      for (int i : lp.groups[j]) w[i] = 0.0;

  // active rows: nonempty after pinning, finite cap
  std::vector<int> rows;
  for (size_t j = 0; j < lp.groups.size(); ++j) {
    if (lp.caps[j] == 0.0 || lp.caps[j] == kInf || lp.groups[j].empty())
      continue;
    bool live = false;
    for (int i : lp.groups[j])
      if (w[i] < 0.0) live = true;
    if (live) rows.push_back(static_cast<int>(j));
  }

  // variables still free and covered by some active row
  std::vector<int> covered(lp.n, 0);
  for (int j : rows)
    for (int i : lp.groups[j])
      if (w[i] < 0.0) covered[i] = 1;
  std::vector<int> vars;
  std::vector<int> var_of(lp.n, -1);
  for (int i = 0; i < lp.n; ++i) {
    if (w[i] < 0.0 && !covered[i]) w[i] = 1.0;  // unconstrained example
    if (w[i] < 0.0) {
      var_of[i] = static_cast<int>(vars.size());
      vars.push_back(i);
    }
  }

  if (!vars.empty()) {
    std::vector<std::vector<int>> var_rows(vars.size());
    std::vector<double> b;
    for (size_t rr = 0; rr < rows.size(); ++rr) {
      int j = rows[rr];
      b.push_back(lp.caps[j]);
      for (int i : lp.groups[j])
        if (var_of[i] >= 0) var_rows[var_of[i]].push_back(static_cast<int>(rr));
    }
    BoundedSimplex simplex(static_cast<int>(vars.size()), var_rows,
                           std::move(b));
    simplex.run();
    for (size_t v = 0; v < vars.size(); ++v)
      w[vars[v]] = std::clamp(simplex.value(static_cast<int>(v)), 0.0, 1.0);
  }

  WeightVector out;
  out.w = std::move(w);
  for (double wi : out.w) out.objective += wi;
  return out;
}

}  // namespace secretprot

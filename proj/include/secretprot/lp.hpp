// The example-weighting linear program:
//   max sum_i w_i   s.t.  for each secret j: sum_{i in group j} w_i <= cap_j,
//                         w_i in [0, 1].
// Solved by primal simplex with upper-bounded variables and Bland's rule,
// so the returned basic solution is deterministic.
#pragma once

#include <string>
#include <vector>

#include "secretprot/divergence.hpp"
#include "secretprot/domain.hpp"

namespace secretprot {

struct WeightLP {
  int n = 0;  // examples
  int m = 0;  // secrets
  std::vector<std::vector<int>> groups;  // per secret, incident example indices
  std::vector<double> caps;              // c * mu_j, may be +inf when r_j = 1
};

struct WeightVector {
  std::vector<double> w;
  double objective = 0.0;
};

// caps[j] = c * budgets[j].mu, matched to map.secrets by secret id.
WeightLP build_lp(const SecretMap& map, const std::vector<KLBudget>& budgets,
                  double c);

// Optimal basic feasible solution; objective within 1e-9 of the optimum.
// Always feasible (w = 0).
WeightVector solve(const WeightLP& lp);

}  // namespace secretprot

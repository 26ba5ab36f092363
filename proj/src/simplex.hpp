#pragma once

#include <cstddef>
#include <vector>

namespace ndg::detail {

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Dense primal simplex for   max c.x  s.t.  A x <= b,  x >= 0,  with b >= 0
/// so the slack basis is feasible. Bland's rule keeps pivoting deterministic
/// and cycle-free. `rows` is row-major, each row of size c.size().
LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& rows,
                  const std::vector<double>& b);

}  // namespace ndg::detail

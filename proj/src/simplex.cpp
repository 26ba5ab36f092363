#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ndg/errors.hpp"

namespace ndg::detail {

LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& rows,
                  const std::vector<double>& b) {
  const std::size_t n = c.size();
  const std::size_t m = rows.size();
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;

  double scale = 1.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double cost_eps = 1e-11 * scale;
  const double pivot_eps = 1e-12;

  std::vector<double> t(m * width, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return t[i * width + j]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != n) throw InvariantError("LP row width mismatch");
    if (b[i] < 0.0) throw InvariantError("LP right-hand side must be non-negative");
    for (std::size_t j = 0; j < n; ++j) at(i, j) = rows[i][j];
    at(i, n + i) = 1.0;
    at(i, rhs) = b[i];
    basis[i] = n + i;
  }
  // Reduced costs of the objective row: r_j = c_j - c_B B^-1 A_j.
  std::vector<double> reduced(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) reduced[j] = c[j];

  LpResult res;
  const std::size_t max_pivots = 50 * (n + m + 10);
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (reduced[j] > cost_eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = at(i, enter);
      if (a <= pivot_eps) continue;
      const double ratio = at(i, rhs) / a;
      const double tie = 1e-15 * std::max(1.0, std::abs(best_ratio));
      if (leave == m || ratio < best_ratio - tie ||
          (std::abs(ratio - best_ratio) <= tie && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == m) throw InvariantError("LP is unbounded");

    const double piv = at(leave, enter);
    for (std::size_t j = 0; j < width; ++j) at(leave, j) /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = at(i, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) at(i, j) -= f * at(leave, j);
      if (at(i, rhs) < 0.0 && at(i, rhs) > -1e-9) at(i, rhs) = 0.0;
    }
    const double rf = reduced[enter];
    for (std::size_t j = 0; j < n + m; ++j) reduced[j] -= rf * at(leave, j);
    basis[leave] = enter;
    if (++res.pivots > max_pivots) throw InvariantError("LP pivot limit exceeded");
  }

  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) res.x[basis[i]] = std::max(0.0, at(i, rhs));
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace ndg::detail

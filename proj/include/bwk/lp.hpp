#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwk {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

/// Dense LP in max form:
///   max objective . x   s.t.   constraint_matrix x <= rhs,  x >= 0,
/// with x_i = 0 enforced for every i in fixed_to_zero.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> constraint_matrix;  // k rows of length n
  std::vector<double> rhs;                             // length k
  std::vector<int> fixed_to_zero;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  void validate() const {
    if (constraint_matrix.size() != rhs.size())
      throw std::invalid_argument("LinearProgram: row count mismatch");
    for (const auto& row : constraint_matrix)
      if (static_cast<int>(row.size()) != num_vars())
        throw std::invalid_argument("LinearProgram: column count mismatch");
    for (double v : rhs)
      if (!std::isfinite(v)) throw std::invalid_argument("LinearProgram: rhs must be finite");
    for (double v : objective)
      if (!std::isfinite(v)) throw std::invalid_argument("LinearProgram: objective must be finite");
    for (int i : fixed_to_zero)
      if (i < 0 || i >= num_vars())
        throw std::invalid_argument("LinearProgram: fixed_to_zero index out of range");
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;   // length n
  std::vector<double> dual;     // length k
  double objective_value = 0.0;
  std::vector<int> basis;       // basic indices; variables in [0,n), slacks in [n,n+k)
  std::vector<double> slacks;   // rhs - Cx, length k
};

namespace lp_detail {

struct SimplexCore {
  // Two-phase dense tableau simplex with Bland's rule on
  //   max c.x  s.t.  A x <= b, x >= 0.
  // Bland's rule (smallest-index entering, smallest-basis-index tie break on
  // leaving) makes the pivot sequence deterministic and cycle-free.
  LpStatus status = LpStatus::Optimal;
  std::vector<double> x, y;
  std::vector<int> basis;

  SimplexCore(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
              const std::vector<double>& b, double tol) {
    const int n = static_cast<int>(c.size());
    const int k = static_cast<int>(b.size());
    const int iter_cap = 50 * (n + k) + 50;

    // Columns: [structural | slacks | artificials], last entry of each row = rhs.
    int n_art = 0;
    for (int i = 0; i < k; ++i)
      if (b[i] < 0) ++n_art;
    const int ncols = n + k + n_art;
    tab_.assign(k, std::vector<double>(ncols + 1, 0.0));
    row_basis_.resize(k);
    ncols_ = ncols;
    k_ = k;

    double rhs_scale = 1.0;
    {
      int a = 0;
      for (int i = 0; i < k; ++i) {
        const double sign = b[i] < 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) tab_[i][j] = sign * A[i][j];
        tab_[i][n + i] = sign;
        tab_[i][ncols] = sign * b[i];
        rhs_scale += std::abs(b[i]);
        if (b[i] < 0) {
          tab_[i][n + k + a] = 1.0;
          row_basis_[i] = n + k + a;
          ++a;
        } else {
          row_basis_[i] = n + i;
        }
      }
    }

    std::vector<double> zrow(ncols, 0.0);
    double zval = 0.0;

    if (n_art > 0) {
      // Phase 1: maximize -(sum of artificials), priced out over the initial basis.
      for (int j = 0; j < ncols; ++j) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
          if (row_basis_[i] >= n + k) s += tab_[i][j];
        zrow[j] = (j >= n + k ? -1.0 : 0.0) + s;
      }
      for (int i = 0; i < k; ++i)
        if (row_basis_[i] >= n + k) zval -= tab_[i][ncols];
      if (!iterate(zrow, zval, ncols, tol, iter_cap))
        throw std::runtime_error("solve_lp: phase-1 unbounded (internal error)");
      if (zval < -tol * rhs_scale) {
        status = LpStatus::Infeasible;
        return;
      }
      // Drive remaining artificials out of the basis where a pivot exists;
      // rows without one are redundant and keep a zero-level artificial.
      for (int i = 0; i < k; ++i) {
        if (row_basis_[i] < n + k) continue;
        for (int j = 0; j < n + k; ++j) {
          if (std::abs(tab_[i][j]) > 1e-7) {
            pivot(i, j, zrow, zval);
            break;
          }
        }
      }
    }

    // Phase 2: original objective (zero on slacks, artificials barred from entering).
    auto cost = [&](int col) { return col < n ? c[col] : 0.0; };
    for (int j = 0; j < ncols; ++j) {
      double zj = 0.0;
      for (int i = 0; i < k; ++i) zj += cost(row_basis_[i]) * tab_[i][j];
      zrow[j] = cost(j) - zj;
    }
    zval = 0.0;
    for (int i = 0; i < k; ++i) zval += cost(row_basis_[i]) * tab_[i][ncols];
    if (!iterate(zrow, zval, n + k, tol, iter_cap)) {
      status = LpStatus::Unbounded;
      return;
    }

    x.assign(n, 0.0);
    for (int i = 0; i < k; ++i)
      if (row_basis_[i] < n) x[row_basis_[i]] = tab_[i][ncols];
    y.assign(k, 0.0);
    for (int j = 0; j < k; ++j) y[j] = -zrow[n + j];
    basis.assign(row_basis_.begin(), row_basis_.end());
    std::erase_if(basis, [&](int idx) { return idx >= n + k; });
    std::sort(basis.begin(), basis.end());
  }

 private:
  std::vector<std::vector<double>> tab_;
  std::vector<int> row_basis_;
  int ncols_ = 0, k_ = 0;

  void pivot(int row, int col, std::vector<double>& zrow, double& zval) {
    const double p = tab_[row][col];
    for (int j = 0; j <= ncols_; ++j) tab_[row][j] /= p;
    for (int i = 0; i < k_; ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= ncols_; ++j) tab_[i][j] -= f * tab_[row][j];
      tab_[i][col] = 0.0;
    }
    const double f = zrow[col];
    if (f != 0.0) {
      zval += f * tab_[row][ncols_];
      for (int j = 0; j < ncols_; ++j) zrow[j] -= f * tab_[row][j];
      zrow[col] = 0.0;
    }
    row_basis_[row] = col;
  }

  // Runs simplex until optimal (true) or unbounded (false).
  bool iterate(std::vector<double>& zrow, double& zval, int allowed_cols, double tol,
               int iter_cap) {
    for (int iter = 0;; ++iter) {
      if (iter > iter_cap)
        throw std::runtime_error("solve_lp: iteration cap exceeded (cycling guard)");
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j)
        if (zrow[j] > tol) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k_; ++i) {
        if (tab_[i][enter] > tol) {
          const double ratio = tab_[i][ncols_] / tab_[i][enter];
          if (leave < 0 || ratio < best - 1e-12 * (1.0 + std::abs(best)) ||
              (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
               row_basis_[i] < row_basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter, zrow, zval);
    }
  }
};

// Deletes fixed-to-zero columns, returning the kept-column index map.
inline std::vector<int> reduce_columns(const LinearProgram& lp, std::vector<double>& c,
                                       std::vector<std::vector<double>>& A) {
  const int n = lp.num_vars();
  std::vector<bool> fixed(n, false);
  for (int i : lp.fixed_to_zero) fixed[i] = true;
  std::vector<int> keep;
  for (int j = 0; j < n; ++j)
    if (!fixed[j]) keep.push_back(j);
  c.resize(keep.size());
  A.assign(lp.num_rows(), std::vector<double>(keep.size()));
  for (size_t jj = 0; jj < keep.size(); ++jj) {
    c[jj] = lp.objective[keep[jj]];
    for (int i = 0; i < lp.num_rows(); ++i) A[i][jj] = lp.constraint_matrix[i][keep[jj]];
  }
  return keep;
}

inline bool solve_square(std::vector<std::vector<double>> M, std::vector<double> r,
                         std::vector<double>& out) {
  const int n = static_cast<int>(r.size());
  out.assign(n, 0.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(M[i][col]) > std::abs(M[piv][col])) piv = i;
    if (std::abs(M[piv][col]) < 1e-10) return false;
    std::swap(M[piv], M[col]);
    std::swap(r[piv], r[col]);
    for (int i = col + 1; i < n; ++i) {
      const double f = M[i][col] / M[col][col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) M[i][j] -= f * M[col][j];
      r[i] -= f * r[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = r[i];
    for (int j = i + 1; j < n; ++j) s -= M[i][j] * out[j];
    out[i] = s / M[i][i];
  }
  return true;
}

}  // namespace lp_detail

/// Solves the LP to optimality with a two-phase primal simplex (Bland's rule).
/// Deterministic for identical input. `tol` is the pivoting tolerance.
inline LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9) {
  lp.validate();
  if (tol <= 0) throw std::invalid_argument("solve_lp: tol must be positive");

  std::vector<double> c;
  std::vector<std::vector<double>> A;
  const std::vector<int> keep = lp_detail::reduce_columns(lp, c, A);

  lp_detail::SimplexCore core(c, A, lp.rhs, tol);
  LpSolution sol;
  sol.status = core.status;
  if (core.status != LpStatus::Optimal) return sol;

  const int n = lp.num_vars();
  const int k = lp.num_rows();
  sol.primal.assign(n, 0.0);
  for (size_t jj = 0; jj < keep.size(); ++jj) sol.primal[keep[jj]] = core.x[jj];
  sol.dual = core.y;
  sol.objective_value =
      std::inner_product(sol.primal.begin(), sol.primal.end(), lp.objective.begin(), 0.0);
  sol.slacks.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double used = std::inner_product(sol.primal.begin(), sol.primal.end(),
                                     lp.constraint_matrix[i].begin(), 0.0);
    sol.slacks[i] = lp.rhs[i] - used;
  }
  const int n_red = static_cast<int>(keep.size());
  for (int idx : core.basis)
    sol.basis.push_back(idx < n_red ? keep[idx] : n + (idx - n_red));
  std::sort(sol.basis.begin(), sol.basis.end());
  return sol;
}

/// Brute-force test oracle: enumerates every basic solution (all size-n active
/// sets drawn from the k row constraints and the n sign constraints) and
/// returns the feasible vertex with the largest objective. Unboundedness is
/// not detected; intended for small bounded instances only.
inline LpSolution enumerate_vertices_oracle(const LinearProgram& lp) {
  lp.validate();
  std::vector<double> c;
  std::vector<std::vector<double>> A;
  const std::vector<int> keep = lp_detail::reduce_columns(lp, c, A);
  const int n = static_cast<int>(keep.size());
  const int k = lp.num_rows();
  if (n + k > 16)
    throw std::invalid_argument("enumerate_vertices_oracle: n + k must be <= 16");

  double rhs_mag = 1.0;
  for (double v : lp.rhs) rhs_mag = std::max(rhs_mag, std::abs(v));
  const double feas_tol = 1e-7 * rhs_mag;

  bool found = false;
  double best_obj = -std::numeric_limits<double>::infinity();
  std::vector<double> best_x;

  const uint32_t total = static_cast<uint32_t>(n + k);
  std::vector<double> x;
  for (uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (std::popcount(mask) != n) continue;
    std::vector<std::vector<double>> M;
    std::vector<double> r;
    M.reserve(n);
    for (uint32_t idx = 0; idx < total; ++idx) {
      if (!(mask & (1u << idx))) continue;
      if (idx < static_cast<uint32_t>(k)) {
        M.push_back(A[idx]);
        r.push_back(lp.rhs[idx]);
      } else {
        std::vector<double> row(n, 0.0);
        row[idx - k] = -1.0;
        M.push_back(row);
        r.push_back(0.0);
      }
    }
    if (!lp_detail::solve_square(M, r, x)) continue;
    bool feasible = true;
    for (int j = 0; j < n && feasible; ++j)
      if (x[j] < -feas_tol) feasible = false;
    for (int i = 0; i < k && feasible; ++i) {
      double used = std::inner_product(x.begin(), x.end(), A[i].begin(), 0.0);
      if (used > lp.rhs[i] + feas_tol) feasible = false;
    }
    if (!feasible) continue;
    const double obj = std::inner_product(x.begin(), x.end(), c.begin(), 0.0);
    if (!found || obj > best_obj + 1e-12) {
      found = true;
      best_obj = obj;
      best_x = x;
    }
  }

  LpSolution sol;
  if (!found) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  sol.primal.assign(lp.num_vars(), 0.0);
  for (int j = 0; j < n; ++j) sol.primal[keep[j]] = std::max(0.0, best_x[j]);
  sol.objective_value = best_obj;
  sol.slacks.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double used = std::inner_product(sol.primal.begin(), sol.primal.end(),
                                     lp.constraint_matrix[i].begin(), 0.0);
    sol.slacks[i] = lp.rhs[i] - used;
  }
  for (int j = 0; j < lp.num_vars(); ++j)
    if (sol.primal[j] > 1e-9) sol.basis.push_back(j);
  return sol;
}

}  // namespace bwk

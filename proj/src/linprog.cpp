#include "chaoslab/linprog.hpp"

#include <cmath>
#include <vector>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr long kBlandAfter = 20000;
constexpr long kMaxIters = 2000000;

// Primal simplex on the standard form: maximize cost.s over s >= 0 with
// S s <= b, b >= 0 (slack basis immediately feasible). Returns the optimal
// structural values s, or Unbounded. Callers encode free variables by
// splitting columns before entry.
LinProgResult simplex_standard(const Eigen::VectorXd& cost_struct,
                               const Eigen::MatrixXd& S,
                               const Eigen::VectorXd& b) {
  const Eigen::Index m = S.rows();
  const Eigen::Index n = S.cols();
  const Eigen::Index cols = n + m;
  Eigen::MatrixXd T(m, cols + 1);
  T.leftCols(n) = S;
  T.middleCols(n, m) = Eigen::MatrixXd::Identity(m, m);
  T.col(cols) = b;

  // Reduced-cost row; slack basis has zero objective coefficients, so the
  // initial reduced costs are just the structural costs.
  Eigen::VectorXd red = Eigen::VectorXd::Zero(cols);
  red.head(n) = cost_struct;
  double objective = 0.0;

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  for (long iter = 0; iter < kMaxIters; ++iter) {
    const bool bland = iter >= kBlandAfter;
    Eigen::Index enter = -1;
    if (bland) {
      for (Eigen::Index j = 0; j < cols; ++j)
        if (red[j] > kCostTol) {
          enter = j;
          break;
        }
    } else {
      double best = kCostTol;
      for (Eigen::Index j = 0; j < cols; ++j)
        if (red[j] > best) {
          best = red[j];
          enter = j;
        }
    }
    if (enter < 0) {
      LinProgResult out;
      out.status = LinProgStatus::Optimal;
      out.objective = objective;
      out.x = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bv = basis[static_cast<std::size_t>(i)];
        if (bv < n) out.x[bv] += T(i, cols);
      }
      return out;
    }

    // Lexicographic ratio test: among rows tying the minimum ratio, compare
    // the scaled tableau rows column by column and keep the smaller. Starting
    // from the identity slack basis every row is lexicographically positive
    // and stays so, which rules out cycling even on the exactly-tied
    // degenerate programs that grid-supported measures produce.
    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = T(i, cols) / a;
      if (leave < 0) {
        leave = i;
        best_ratio = ratio;
        continue;
      }
      const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
      if (ratio < best_ratio - tie) {
        leave = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + tie) {
        const double ai = T(i, enter);
        const double al = T(leave, enter);
        for (Eigen::Index j = 0; j < cols; ++j) {
          const double ri = T(i, j) / ai;
          const double rl = T(leave, j) / al;
          if (std::abs(ri - rl) <= 1e-12 * (1.0 + std::abs(rl))) continue;
          if (ri < rl) {
            leave = i;
            best_ratio = ratio;
          }
          break;
        }
      }
    }
    if (leave < 0) {
      LinProgResult out;
      out.status = LinProgStatus::Unbounded;
      out.objective = std::numeric_limits<double>::infinity();
      out.x = Eigen::VectorXd::Zero(n);
      return out;
    }

    // Pivot.
    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    const double rc = red[enter];
    red -= rc * T.row(leave).head(cols);
    objective += rc * T(leave, cols);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  throw Error("linprog: iteration limit exceeded");
}

}  // namespace

LinProgResult maximize_free(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& b) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n || b.size() != m)
    throw InvalidInputError("maximize_free: dimension mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (b[i] < 0.0)
      throw InvalidInputError("maximize_free: requires b >= 0");

  // x = u - v with u, v >= 0.
  Eigen::MatrixXd S(m, 2 * n);
  S.leftCols(n) = A;
  S.rightCols(n) = -A;
  Eigen::VectorXd cost(2 * n);
  cost.head(n) = c;
  cost.tail(n) = -c;

  LinProgResult res = simplex_standard(cost, S, b);
  if (res.status == LinProgStatus::Optimal)
    res.x = (res.x.head(n) - res.x.tail(n)).eval();
  else
    res.x = Eigen::VectorXd::Zero(n);
  return res;
}

LinProgResult maximize_nonneg(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& b) {
  if (c.size() != A.cols() || b.size() != A.rows())
    throw InvalidInputError("maximize_nonneg: dimension mismatch");
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    if (b[i] < 0.0)
      throw InvalidInputError("maximize_nonneg: requires b >= 0");
  return simplex_standard(c, A, b);
}

}  // namespace chaoslab

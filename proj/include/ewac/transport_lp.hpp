#ifndef EWAC_TRANSPORT_LP_HPP
#define EWAC_TRANSPORT_LP_HPP

// Linear programs over the transportation polytope
//
//   { X >= 0 : X 1 = r, X^T 1 = s, X(i,j) = 0 for (i,j) in mask }
//
// solved with a dense two-phase primal simplex under Bland's rule. Masked
// cells are removed from the variable set, so they are exactly zero in every
// returned solution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ewac/errors.hpp"

namespace ewac {

enum class Sense { minimize, maximize };
enum class LpStatus { optimal, infeasible };

/// Set of (row, column) cells forced to zero. Indices are zero-based.
class ZeroMask {
 public:
  using Cell = std::pair<Eigen::Index, Eigen::Index>;

  ZeroMask() = default;
  explicit ZeroMask(const std::vector<Cell>& cells) {
    for (const Cell& c : cells) {
      if (c.first < 0 || c.second < 0) throw InvalidInput("zero mask: negative cell index");
      if (!cells_.insert(c).second) {
        throw InvalidInput("zero mask: duplicate cell (" + std::to_string(c.first + 1) +
                           "," + std::to_string(c.second + 1) + ")");
      }
    }
  }

  bool contains(Eigen::Index i, Eigen::Index j) const { return cells_.count({i, j}) > 0; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::set<Cell>& cells() const { return cells_; }

  void validate(Eigen::Index rows, Eigen::Index cols) const {
    for (const Cell& c : cells_) {
      if (c.first >= rows || c.second >= cols) {
        throw InvalidInput("zero mask cell (" + std::to_string(c.first + 1) + "," +
                           std::to_string(c.second + 1) + ") outside the " +
                           std::to_string(rows) + "x" + std::to_string(cols) + " table");
      }
    }
  }

  friend bool operator==(const ZeroMask&, const ZeroMask&) = default;

 private:
  std::set<Cell> cells_;
};

template <typename Scalar>
struct TransportTolerances {
  static constexpr Scalar feasibility() { return Scalar(1e-9); }
  static constexpr Scalar optimality() { return Scalar(1e-9); }
  static constexpr Scalar pivot() { return Scalar(1e-11); }
  static constexpr Scalar balance() { return Scalar(1e-12); }
};

template <typename Scalar>
struct TransportProblem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TransportProblem(Matrix costs_, Vector row_targets_, Vector col_targets_,
                   ZeroMask zero_mask_ = {}, Sense sense_ = Sense::minimize)
      : costs(std::move(costs_)),
        row_targets(std::move(row_targets_)),
        col_targets(std::move(col_targets_)),
        zero_mask(std::move(zero_mask_)),
        sense(sense_) {
    if (costs.rows() != row_targets.size() || costs.cols() != col_targets.size() ||
        costs.size() == 0) {
      throw InvalidInput("transport problem: cost matrix does not match target lengths");
    }
    if ((row_targets.array() < Scalar(0)).any() || (col_targets.array() < Scalar(0)).any()) {
      throw InvalidInput("transport problem: targets must be nonnegative");
    }
    using std::abs;
    if (abs(row_targets.sum() - col_targets.sum()) > TransportTolerances<Scalar>::balance()) {
      throw InvalidInput("transport problem: row and column targets have different totals");
    }
    zero_mask.validate(costs.rows(), costs.cols());
  }

  Matrix costs;
  Vector row_targets;
  Vector col_targets;
  ZeroMask zero_mask;
  Sense sense;
};

template <typename Scalar>
struct LpSolution {
  Scalar value = Scalar(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> theta;
  LpStatus status = LpStatus::infeasible;
  int iterations = 0;
};

namespace detail {

// Dense tableau for  A x = b, x >= 0  with an artificial identity block.
// Layout: rows [0, m) constraints, row m objective; columns [0, n) structural,
// [n, n + m) artificial, last column right-hand side.
template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Tol = TransportTolerances<Scalar>;

  Tableau(const Matrix& A, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b)
      : m_(A.rows()), n_(A.cols()), t_(Matrix::Zero(A.rows() + 1, A.cols() + A.rows() + 1)),
        basis_(static_cast<std::size_t>(A.rows())), active_(static_cast<std::size_t>(A.rows()), true) {
    t_.topLeftCorner(m_, n_) = A;
    t_.block(0, n_, m_, m_).setIdentity();
    t_.col(rhs()).head(m_) = b;
    for (Eigen::Index r = 0; r < m_; ++r) basis_[static_cast<std::size_t>(r)] = n_ + r;
  }

  Eigen::Index rhs() const { return n_ + m_; }
  bool is_artificial(Eigen::Index col) const { return col >= n_ && col < n_ + m_; }

  // Objective row = c - c_B B^{-1} A for the given full cost vector.
  void set_objective(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(n_ + m_) = cost.transpose();
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (!active_[static_cast<std::size_t>(r)]) continue;
      const Scalar cb = cost[basis_[static_cast<std::size_t>(r)]];
      if (cb != Scalar(0)) t_.row(m_) -= cb * t_.row(r);
    }
  }

  Scalar objective_value() const { return -t_(m_, rhs()); }

  // Bland's rule: lowest-index improving column enters; ratio ties broken by
  // the lowest basic variable index. Returns iterations performed.
  int optimize(bool allow_artificial_entering, int& total_iterations) {
    constexpr int kMaxIterations = 100000;
    int iterations = 0;
    for (;;) {
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (!allow_artificial_entering && is_artificial(j)) continue;
        if (t_(m_, j) < -Tol::optimality()) {
          entering = j;
          break;
        }
      }
      if (entering < 0) break;

      Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (active_[static_cast<std::size_t>(r)] && t_(r, entering) > Tol::pivot())
          best_ratio = std::min(best_ratio, t_(r, rhs()) / t_(r, entering));
      }
      Eigen::Index leaving = -1;
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (!active_[static_cast<std::size_t>(r)] || t_(r, entering) <= Tol::pivot()) continue;
        if (t_(r, rhs()) / t_(r, entering) > best_ratio + Tol::pivot()) continue;
        if (leaving < 0 ||
            basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leaving)])
          leaving = r;
      }
      if (leaving < 0) throw NumericalFailure("transport LP: unbounded direction in a bounded polytope");
      pivot(leaving, entering);
      ++iterations;
      if (++total_iterations > kMaxIterations) {
        throw NumericalFailure("transport LP: iteration limit exceeded");
      }
    }
    return iterations;
  }

  // After phase 1: pivot zero-level artificials out of the basis, or retire
  // their rows when they are linearly dependent on the others.
  void expel_artificials() {
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (!active_[static_cast<std::size_t>(r)] || !is_artificial(basis_[static_cast<std::size_t>(r)])) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(r, j)) > Tol::pivot()) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(r, col);
      } else {
        active_[static_cast<std::size_t>(r)] = false;
      }
    }
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> primal() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      if (active_[static_cast<std::size_t>(r)] && b < n_) x[b] = t_(r, rhs());
    }
    return x;
  }

 private:
  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const Scalar f = t_(r, col);
      if (f != Scalar(0)) t_.row(r) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
};

}  // namespace detail

/// Optimises <costs, X> over the masked transportation polytope.
///
/// Returns status infeasible (with a zero theta) when phase 1 cannot drive
/// the artificial variables to zero. Maximisation negates the costs.
template <typename Scalar>
LpSolution<Scalar> solve(const TransportProblem<Scalar>& problem) {
  using Matrix = typename TransportProblem<Scalar>::Matrix;
  using Vector = typename TransportProblem<Scalar>::Vector;
  using Tol = TransportTolerances<Scalar>;

  const Eigen::Index rows = problem.costs.rows();
  const Eigen::Index cols = problem.costs.cols();

  // Free cells in row-major order; this order fixes Bland's tie-breaking.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!problem.zero_mask.contains(i, j)) cells.emplace_back(i, j);
  const auto num_vars = static_cast<Eigen::Index>(cells.size());

  // Row constraints, then all column constraints but the last (the full set
  // has rank at most rows + cols - 1).
  const Eigen::Index num_cons = rows + cols - 1;
  Matrix A = Matrix::Zero(num_cons, num_vars);
  Vector b(num_cons);
  b.head(rows) = problem.row_targets;
  b.tail(cols - 1) = problem.col_targets.head(cols - 1);
  for (Eigen::Index k = 0; k < num_vars; ++k) {
    const auto [i, j] = cells[static_cast<std::size_t>(k)];
    A(i, k) = Scalar(1);
    if (j < cols - 1) A(rows + j, k) = Scalar(1);
  }

  LpSolution<Scalar> sol;
  sol.theta = Matrix::Zero(rows, cols);

  detail::Tableau<Scalar> tableau(A, b);
  Vector phase1_cost = Vector::Zero(num_vars + num_cons);
  phase1_cost.tail(num_cons).setOnes();
  tableau.set_objective(phase1_cost);
  tableau.optimize(true, sol.iterations);

  // The dropped column equation is implied only when the kept ones hold.
  bool feasible = tableau.objective_value() <= Tol::feasibility();
  if (feasible) {
    tableau.expel_artificials();
    Vector phase2_cost = Vector::Zero(num_vars + num_cons);
    const Scalar sign = problem.sense == Sense::maximize ? Scalar(-1) : Scalar(1);
    for (Eigen::Index k = 0; k < num_vars; ++k) {
      const auto [i, j] = cells[static_cast<std::size_t>(k)];
      phase2_cost[k] = sign * problem.costs(i, j);
    }
    tableau.set_objective(phase2_cost);
    tableau.optimize(false, sol.iterations);

    const Vector x = tableau.primal();
    for (Eigen::Index k = 0; k < num_vars; ++k) {
      const auto [i, j] = cells[static_cast<std::size_t>(k)];
      sol.theta(i, j) = x[k] < Scalar(0) ? Scalar(0) : x[k];
    }
    using std::abs;
    const Vector last_col = sol.theta.col(cols - 1);
    feasible = abs(last_col.sum() - problem.col_targets[cols - 1]) <= Tol::feasibility();
  }
  if (!feasible) {
    sol.status = LpStatus::infeasible;
    sol.theta.setZero();
    sol.value = Scalar(0);
    return sol;
  }
  sol.status = LpStatus::optimal;
  sol.value = problem.costs.cwiseProduct(sol.theta).sum();
  return sol;
}

/// Max-flow test for the existence of a nonnegative matrix with the given
/// marginals that vanishes on the mask. Independent of the simplex code.
template <typename Scalar>
bool check_feasibility(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& row_targets,
                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& col_targets,
                       const ZeroMask& zero_mask) {
  using std::abs;
  using Tol = TransportTolerances<Scalar>;
  const Eigen::Index rows = row_targets.size();
  const Eigen::Index cols = col_targets.size();
  zero_mask.validate(rows, cols);
  if (abs(row_targets.sum() - col_targets.sum()) > Tol::balance()) return false;

  // Nodes: 0 source, 1..rows, rows+1..rows+cols, sink.
  const Eigen::Index nodes = rows + cols + 2;
  const Eigen::Index sink = nodes - 1;
  const Scalar big = row_targets.sum() + Scalar(1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cap =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(nodes, nodes);
  for (Eigen::Index i = 0; i < rows; ++i) cap(0, 1 + i) = row_targets[i];
  for (Eigen::Index j = 0; j < cols; ++j) cap(1 + rows + j, sink) = col_targets[j];
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!zero_mask.contains(i, j)) cap(1 + i, 1 + rows + j) = big;

  const Scalar eps = Scalar(1e-15);
  Scalar flow = Scalar(0);
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(nodes));
  for (;;) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[0] = 0;
    std::deque<Eigen::Index> queue{0};
    while (!queue.empty() && parent[static_cast<std::size_t>(sink)] < 0) {
      const Eigen::Index u = queue.front();
      queue.pop_front();
      for (Eigen::Index v = 0; v < nodes; ++v) {
        if (parent[static_cast<std::size_t>(v)] < 0 && cap(u, v) > eps) {
          parent[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[static_cast<std::size_t>(sink)] < 0) break;
    Scalar push = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index v = sink; v != 0; v = parent[static_cast<std::size_t>(v)])
      push = std::min(push, cap(parent[static_cast<std::size_t>(v)], v));
    for (Eigen::Index v = sink; v != 0; v = parent[static_cast<std::size_t>(v)]) {
      const Eigen::Index u = parent[static_cast<std::size_t>(v)];
      cap(u, v) -= push;
      cap(v, u) += push;
    }
    flow += push;
  }
  return flow >= row_targets.sum() - Tol::feasibility();
}

/// North-west corner rule: a vertex of the unmasked transportation polytope.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> north_west_corner(
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row_targets,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col_targets) {
  const Eigen::Index rows = row_targets.size();
  const Eigen::Index cols = col_targets.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows, cols);
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  while (i < rows && j < cols) {
    const Scalar q = std::min(row_targets[i], col_targets[j]);
    x(i, j) = q;
    row_targets[i] -= q;
    col_targets[j] -= q;
    if (row_targets[i] <= col_targets[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return x;
}

}  // namespace ewac

#endif  // EWAC_TRANSPORT_LP_HPP

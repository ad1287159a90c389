#ifndef DOPT_LP_HPP
#define DOPT_LP_HPP

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace dopt {

enum class LpStatus { optimal, infeasible, iteration_limit, cutoff };

/// Dense bounded dual simplex for
///
///   maximize c^T z  subject to  A z <= b,  lo <= z <= hi
///
/// with finite bounds on every structural variable. Finite bounds make the
/// all-slack basis dual feasible (each structural variable sits at the bound
/// its cost favors), so no phase one is needed, and bound changes keep the
/// current basis dual feasible. That makes the object cheap to copy and
/// re-solve after branching.
///
/// While the dual simplex runs, the objective of the current basic solution
/// is a valid upper bound on the LP optimum; solve() reports it through
/// bound() even when it stops early.
class DualSimplex {
 public:
  DualSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  int num_vars() const { return n_; }
  int num_rows() const { return m_; }

  void set_bounds(int j, double lo, double hi);
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }

  /// Runs dual simplex pivots from the current basis. Stops early with
  /// `cutoff` once the bound drops to or below `cutoff`.
  LpStatus solve(int iteration_limit,
                 double cutoff = -std::numeric_limits<double>::infinity());

  /// Objective of the current basic solution. After `optimal` it is the LP
  /// value; after `iteration_limit` or `cutoff` it is an upper bound on it.
  double bound() const { return objective_; }
  /// Structural part of the current basic solution.
  Eigen::VectorXd solution() const;
  int iterations() const { return iterations_; }

 private:
  void compute_basic_values();
  void pivot(int row, int col);

  int n_;  // structural variables
  int m_;  // rows == slacks
  Eigen::MatrixXd tableau_;  // B^{-1} [A I]
  Eigen::VectorXd rhs_;      // B^{-1} b
  Eigen::VectorXd cost_;     // [c 0]
  Eigen::VectorXd reduced_;  // cost - c_B^T B^{-1} [A I]
  Eigen::VectorXd lo_, hi_;  // bounds of all n + m variables
  Eigen::VectorXd value_;    // current value of all variables
  std::vector<int> basis_;   // variable basic in each row
  std::vector<int> row_of_;  // row of a basic variable, -1 if nonbasic
  std::vector<char> at_upper_;  // nonbasic status
  double objective_ = 0.0;
  int iterations_ = 0;
};

}  // namespace dopt

#endif  // DOPT_LP_HPP

#include "dopt/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace dopt {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DualSimplex::DualSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi)
    : n_(static_cast<int>(a.cols())), m_(static_cast<int>(a.rows())) {
  if (b.size() != m_ || c.size() != n_ || lo.size() != n_ || hi.size() != n_)
    throw std::invalid_argument("LP data dimensions disagree");
  for (int j = 0; j < n_; ++j)
    if (!std::isfinite(lo[j]) || !std::isfinite(hi[j]) || lo[j] > hi[j])
      throw std::invalid_argument("LP structural bounds must be finite and ordered");
  const int total = n_ + m_;
  tableau_.resize(m_, total);
  tableau_.leftCols(n_) = a;
  tableau_.rightCols(m_).setIdentity();
  rhs_ = b;
  cost_ = Eigen::VectorXd::Zero(total);
  cost_.head(n_) = c;
  reduced_ = cost_;
  lo_ = Eigen::VectorXd::Zero(total);
  hi_ = Eigen::VectorXd::Constant(total, kInf);
  lo_.head(n_) = lo;
  hi_.head(n_) = hi;
  value_ = Eigen::VectorXd::Zero(total);
  basis_.resize(m_);
  row_of_.assign(total, -1);
  at_upper_.assign(total, 0);
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    row_of_[n_ + i] = i;
  }
  for (int j = 0; j < n_; ++j) {
    at_upper_[j] = c[j] > 0.0;
    value_[j] = at_upper_[j] ? hi[j] : lo[j];
  }
  compute_basic_values();
}

void DualSimplex::set_bounds(int j, double lo, double hi) {
  if (j < 0 || j >= n_) throw std::out_of_range("LP variable index");
  if (!(lo <= hi)) throw std::invalid_argument("LP bounds out of order");
  lo_[j] = lo;
  hi_[j] = hi;
  if (row_of_[j] < 0) {
    if (reduced_[j] > 0.0) at_upper_[j] = 1;
    if (reduced_[j] < 0.0) at_upper_[j] = 0;
    value_[j] = at_upper_[j] ? hi : lo;
  }
}

void DualSimplex::compute_basic_values() {
  Eigen::VectorXd nonbasic = value_;
  for (int i = 0; i < m_; ++i) nonbasic[basis_[i]] = 0.0;
  const Eigen::VectorXd beta = rhs_ - tableau_ * nonbasic;
  for (int i = 0; i < m_; ++i) value_[basis_[i]] = beta[i];
  objective_ = cost_.dot(value_);
}

void DualSimplex::pivot(int row, int col) {
  const double piv = tableau_(row, col);
  tableau_.row(row) /= piv;
  rhs_[row] /= piv;
  Eigen::VectorXd column = tableau_.col(col);
  column[row] = 0.0;
  tableau_.noalias() -= column * tableau_.row(row);
  rhs_ -= column * rhs_[row];
  const double dj = reduced_[col];
  reduced_ -= dj * tableau_.row(row).transpose();
  reduced_[col] = 0.0;
  const int leaving = basis_[row];
  row_of_[leaving] = -1;
  basis_[row] = col;
  row_of_[col] = row;
}

LpStatus DualSimplex::solve(int iteration_limit, double cutoff) {
  compute_basic_values();
  int local_iterations = 0;
  while (true) {
    if (objective_ <= cutoff) return LpStatus::cutoff;

    int leave_row = -1;
    double worst = 0.0;
    bool below = false;
    for (int i = 0; i < m_; ++i) {
      const int var = basis_[i];
      const double x = value_[var];
      const double lo_gap = lo_[var] - x;
      const double hi_gap = x - hi_[var];
      const double tol_lo = kFeasTol * (1.0 + std::abs(lo_[var]));
      if (lo_gap > tol_lo && lo_gap > worst) {
        worst = lo_gap;
        leave_row = i;
        below = true;
      } else if (std::isfinite(hi_[var]) && hi_gap > kFeasTol * (1.0 + std::abs(hi_[var])) &&
                 hi_gap > worst) {
        worst = hi_gap;
        leave_row = i;
        below = false;
      }
    }
    if (leave_row < 0) return LpStatus::optimal;
    if (local_iterations >= iteration_limit) return LpStatus::iteration_limit;

    int enter = -1;
    double best_ratio = kInf;
    double best_alpha = 0.0;
    const int total = n_ + m_;
    for (int j = 0; j < total; ++j) {
      if (row_of_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const double alpha = tableau_(leave_row, j);
      if (std::abs(alpha) <= kPivotTol) continue;
      // x_leave moves by -alpha * dx_j; a variable at its lower bound can only
      // increase, one at its upper bound can only decrease.
      const bool can_increase = !at_upper_[j];
      const bool helps = below ? (can_increase ? alpha < 0.0 : alpha > 0.0)
                               : (can_increase ? alpha > 0.0 : alpha < 0.0);
      if (!helps) continue;
      const double ratio = std::abs(reduced_[j]) / std::abs(alpha);
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && std::abs(alpha) > std::abs(best_alpha))) {
        best_ratio = ratio;
        best_alpha = alpha;
        enter = j;
      }
    }
    if (enter < 0) return LpStatus::infeasible;

    const int leaving = basis_[leave_row];
    pivot(leave_row, enter);
    at_upper_[leaving] = below ? 0 : 1;
    value_[leaving] = below ? lo_[leaving] : hi_[leaving];
    at_upper_[enter] = 0;
    ++iterations_;
    ++local_iterations;
    compute_basic_values();
  }
}

Eigen::VectorXd DualSimplex::solution() const { return value_.head(n_); }

}  // namespace dopt

#include "dopt/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dopt/errors.hpp"

namespace dopt {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_of(const Eigen::MatrixXd& s) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s);
}

}  // namespace

InfoMatrix::InfoMatrix(Eigen::MatrixXd s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols()) throw std::invalid_argument("information matrix must be square");
  const double scale = std::max(1.0, s_.cwiseAbs().maxCoeff());
  if ((s_ - s_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument("information matrix is not symmetric");
  s_ = 0.5 * (s_ + s_.transpose());
  factorize();
}

void InfoMatrix::factorize() {
  const int p = dim();
  if (p == 0) {
    rank_ = 0;
    logdet_ = 0.0;
    return;
  }
  ldlt_.compute(s_);
  const Eigen::VectorXd diag = ldlt_.vectorD();
  const double largest = diag.maxCoeff();
  rank_ = 0;
  double acc = 0.0;
  if (largest > 0.0) {
    for (int i = 0; i < p; ++i) {
      if (diag[i] > kRankTolerance * largest) {
        ++rank_;
        acc += std::log(diag[i]);
      }
    }
  }
  logdet_ = rank_ == p ? acc : -std::numeric_limits<double>::infinity();
}

Eigen::VectorXd InfoMatrix::solve(const Eigen::VectorXd& v) const {
  if (!full_rank()) throw std::domain_error("solve on a rank-deficient information matrix");
  return ldlt_.solve(v);
}

Eigen::MatrixXd InfoMatrix::inverse() const {
  if (!full_rank()) throw std::domain_error("inverse of a rank-deficient information matrix");
  Eigen::MatrixXd inv = ldlt_.solve(Eigen::MatrixXd::Identity(dim(), dim()));
  return 0.5 * (inv + inv.transpose());
}

InfoMatrix InfoMatrix::updated(const Eigen::VectorXd& v, double sign) const {
  InfoMatrix out;
  out.s_ = s_;
  out.s_.noalias() += sign * v * v.transpose();
  out.factorize();
  return out;
}

double logdet(const InfoMatrix& s) { return s.logdet(); }

double det_update_full_rank(const InfoMatrix& s, const Eigen::VectorXd& v) {
  if (!s.full_rank())
    throw std::domain_error("full-rank determinant update on a rank-deficient matrix");
  return 1.0 + v.dot(s.solve(v));
}

double det_update_rank_deficient(const InfoMatrix& s, const Eigen::VectorXd& v) {
  if (s.rank() != s.dim() - 1)
    throw std::domain_error("rank-deficient determinant update needs rank p-1, got " +
                            std::to_string(s.rank()));
  const auto es = eigen_of(s.matrix());
  const double c = es.eigenvectors().col(0).dot(v);
  return c * c;
}

double log_kdet(const InfoMatrix& s, int m) {
  if (m < 1 || m > s.dim()) throw std::invalid_argument("kdet needs 1 <= m <= p");
  const Eigen::VectorXd ev = eigen_of(s.matrix()).eigenvalues();
  double acc = 0.0;
  for (int i = s.dim() - m; i < s.dim(); ++i) {
    if (ev[i] <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(ev[i]);
  }
  return acc;
}

double kdet(const InfoMatrix& s, int m) {
  if (m < 1 || m > s.dim()) throw std::invalid_argument("kdet needs 1 <= m <= p");
  const Eigen::VectorXd ev = eigen_of(s.matrix()).eigenvalues();
  double prod = 1.0;
  for (int i = s.dim() - m; i < s.dim(); ++i) prod *= ev[i];
  return prod;
}

Eigen::MatrixXd pricing_matrix(const InfoMatrix& s) {
  const int p = s.dim();
  if (s.full_rank()) return s.inverse();
  if (s.rank() < p - 1)
    throw std::domain_error("pricing matrix needs rank >= p-1, got " + std::to_string(s.rank()));
  const auto es = eigen_of(s.matrix());
  const int nullity = p - s.rank();
  const Eigen::MatrixXd u = es.eigenvectors().leftCols(nullity);
  Eigen::MatrixXd g = u * u.transpose();
  return 0.5 * (g + g.transpose());
}

InfoMatrix rank_one_downdate(const InfoMatrix& s, const Eigen::VectorXd& v) {
  InfoMatrix out;
  out.s_ = s.matrix();
  out.s_.noalias() -= v * v.transpose();
  const double scale = std::max(s.matrix().trace(), std::numeric_limits<double>::min());
  const auto es = eigen_of(out.s_);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (ev.size() > 0 && ev[0] < 0.0) {
    if (ev[0] < -kClampTolerance * scale)
      throw NumericalError("downdate left an eigenvalue of " + std::to_string(ev[0]) +
                           "; the design state is inconsistent");
    const Eigen::VectorXd clamped = ev.cwiseMax(0.0);
    out.s_ = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    out.s_ = 0.5 * (out.s_ + out.s_.transpose());
    out.clamped_ = true;
  }
  out.factorize();
  return out;
}

Eigen::MatrixXi pm1_to_01_transform(const Eigen::MatrixXi& v) {
  if ((v.array() != 1 && v.array() != -1).any())
    throw std::invalid_argument("pm1_to_01_transform needs entries in {-1, 1}");
  Eigen::MatrixXi out = v;
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    if (out(0, j) == -1) out.col(j) *= -1;
  for (Eigen::Index i = 1; i < out.rows(); ++i) {
    out.row(i) += out.row(0);
    out.row(i) /= 2;
  }
  return out;
}

}  // namespace dopt

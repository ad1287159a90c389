#ifndef DOPT_LINALG_HPP
#define DOPT_LINALG_HPP

#include <Eigen/Dense>

namespace dopt {

/// Relative pivot threshold below which a pivot counts as zero.
inline constexpr double kRankTolerance = 1e-10;
/// Negative eigenvalues of a downdated matrix down to -kClampTolerance * trace
/// are clamped to zero; anything below is an inconsistent design state.
inline constexpr double kClampTolerance = 1e-8;

/// Symmetric PSD information matrix with a cached pivoted LDL^T
/// factorization. Value type; every mutation refactorizes.
class InfoMatrix {
 public:
  InfoMatrix() = default;
  /// Throws std::invalid_argument if s is not square or not symmetric within
  /// 1e-9 of its largest entry.
  explicit InfoMatrix(Eigen::MatrixXd s);

  static InfoMatrix zero(int p) { return InfoMatrix(Eigen::MatrixXd::Zero(p, p)); }

  const Eigen::MatrixXd& matrix() const { return s_; }
  int dim() const { return static_cast<int>(s_.rows()); }
  int rank() const { return rank_; }
  bool full_rank() const { return rank_ == dim(); }
  /// ln det S, or -infinity when rank < p.
  double logdet() const { return logdet_; }
  /// True when the last downdate clamped a slightly negative eigenvalue.
  bool clamped() const { return clamped_; }

  /// S^{-1} v; requires full rank.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd inverse() const;

  /// S + sign * v v^T, refactorized.
  InfoMatrix updated(const Eigen::VectorXd& v, double sign = 1.0) const;

 private:
  friend InfoMatrix rank_one_downdate(const InfoMatrix&, const Eigen::VectorXd&);
  void factorize();

  Eigen::MatrixXd s_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  int rank_ = 0;
  double logdet_ = 0.0;
  bool clamped_ = false;
};

double logdet(const InfoMatrix& s);

/// 1 + v^T S^{-1} v, so that det(S + v v^T) = det(S) * factor. Throws
/// std::domain_error when S is rank deficient.
double det_update_full_rank(const InfoMatrix& s, const Eigen::VectorXd& v);

/// v^T (I - S^+ S) v for rank(S) = p - 1, so that
/// det(S + v v^T) = kdet(S, p - 1) * value. Throws std::domain_error when
/// rank(S) != p - 1.
double det_update_rank_deficient(const InfoMatrix& s, const Eigen::VectorXd& v);

/// Product of the m largest eigenvalues.
double kdet(const InfoMatrix& s, int m);
double log_kdet(const InfoMatrix& s, int m);

/// S^{-1} when S has full rank, else the orthogonal projector I - S^+ S onto
/// the null space. Requires rank(S) >= p - 1.
Eigen::MatrixXd pricing_matrix(const InfoMatrix& s);

/// S - v v^T. Eigenvalues in [-1e-8 trace, 0) are clamped to zero and the
/// result is flagged; lower eigenvalues throw NumericalError.
InfoMatrix rank_one_downdate(const InfoMatrix& s, const Eigen::VectorXd& v);

/// Sign-flips columns so the first row is all ones, adds the first row to
/// every other row and halves those rows. Maps a {-1,1} matrix to a {0,1}
/// matrix whose Gram determinant is smaller by exactly 2^{2(p-1)}.
Eigen::MatrixXi pm1_to_01_transform(const Eigen::MatrixXi& v);

}  // namespace dopt

#endif  // DOPT_LINALG_HPP

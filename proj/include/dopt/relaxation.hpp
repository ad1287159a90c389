#ifndef DOPT_RELAXATION_HPP
#define DOPT_RELAXATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dopt/linalg.hpp"
#include "dopt/model.hpp"
#include "dopt/pricing.hpp"

namespace dopt {

/// Weighted design over a stored point set P'. `experiments` is parallel to
/// `points` when the points come from an instance, and empty otherwise.
struct ContinuousDesign {
  std::vector<DesignPoint> points;
  std::vector<Experiment> experiments;
  Eigen::VectorXd weights;
  double k = 0.0;
  InfoMatrix moment;

  double objective() const { return moment.logdet(); }
  int support_size() const { return static_cast<int>((weights.array() > 0.0).count()); }
};

Eigen::MatrixXd moment_matrix(const std::vector<DesignPoint>& points,
                              const Eigen::VectorXd& weights);

enum class MasterMethod {
  /// lambda_v <- lambda_v * v^T M^{-1} v / p, rescaled to k.
  multiplicative,
  /// Log-barrier Newton method on an active subset of the points, with
  /// violated points added until every point satisfies the stopping test.
  newton,
};

struct MasterOptions {
  MasterMethod method = MasterMethod::newton;
  /// Stop when max_v v^T M^{-1} v <= (1 + tol) p / k.
  double tol = 1e-9;
  std::int64_t max_iterations = 100'000;
};

struct MasterStats {
  std::int64_t iterations = 0;
  bool converged = false;
};

/// Maximizes ln det sum lambda_v v v^T over sum lambda = k, lambda >= 0.
/// `initial` (same length as points, nonnegative, rank-p support) warm-starts
/// the iteration; the default is uniform weights. Throws DegenerateInstance
/// when the points do not span R^p and SolverLimit on the iteration cap.
ContinuousDesign solve_restricted_master(const std::vector<DesignPoint>& points, double k,
                                         const MasterOptions& options = {},
                                         const std::optional<Eigen::VectorXd>& initial = std::nullopt,
                                         MasterStats* stats = nullptr);

enum class CertificateScope { restricted, full };
const char* to_string(CertificateScope scope);

/// (Lambda, nu) with v^T Lambda v <= nu on the certified set; objective is
/// k nu - ln det Lambda - p.
struct DualCertificate {
  Eigen::MatrixXd lambda;
  double nu = 0.0;
  double k = 0.0;
  double objective = 0.0;
  CertificateScope scope = CertificateScope::restricted;
};

double dual_objective(const Eigen::MatrixXd& lambda, double nu, double k);

/// Lambda = M^{-1}, nu = max over all stored points of v^T Lambda v.
DualCertificate dual_from_primal(const ContinuousDesign& cd);

struct AlphaResult {
  Experiment x;
  double alpha = 0.0;
  /// alpha is the proven maximum; otherwise only a lower bound.
  bool exact = false;
};

/// alpha = max over the experiment space of p(x)^T Lambda p(x).
AlphaResult check_dual_feasibility(const DualCertificate& cert, const Pricer& pricer,
                                   const std::optional<PricingResult>& incumbent = std::nullopt);

/// k alpha - ln det Lambda - p. Throws std::invalid_argument when alpha is not
/// exact, since the bound would be invalid.
double upper_bound_from_alpha(const DualCertificate& cert, double alpha, double k, int p,
                              bool alpha_exact = true);

/// Full-space certificate (Lambda, alpha).
DualCertificate certify(const DualCertificate& cert, double alpha);

enum class SparsifyMode {
  /// Stop once the support is at most C(p,2) + p + 1.
  to_bound,
  /// Continue until the support vectors' constraint columns are independent
  /// (a basic feasible solution).
  to_basic,
};

/// Carathéodory reduction: repeatedly moves the weights along a kernel
/// vector of the moment-and-sum system on the support until a weight hits
/// zero, then drops it. The moment matrix and weight sum are unchanged.
/// Zero-weight points are removed from the result.
ContinuousDesign sparsify(const ContinuousDesign& cd, SparsifyMode mode = SparsifyMode::to_bound);

int sparsity_bound(int p);

struct ColumnGenerationParams {
  double delta = 0.05;
  double epsilon = 1e-4;
  double gamma = 1e-6;
  std::uint64_t seed = 0;
  std::int64_t max_iterations = 10'000;
  std::uint64_t sample_cap = 100'000;
  MasterOptions master;
  /// Start in dual-only mode (exercises that branch).
  bool start_in_dual_mode = false;
};

enum class CgMode { primal, dual };
const char* to_string(CgMode mode);

struct CgTraceEntry {
  std::int64_t iter = 0;
  double master_obj = 0.0;
  double nu = 0.0;
  double heuristic_value = 0.0;
  std::optional<double> alpha;  // set when an exact solve finished
  std::optional<double> upper_bound;
  CgMode mode = CgMode::primal;
  int n_points = 0;
  /// |P'| plus the new columns, before any sparsification.
  int candidates = 0;
  bool sparsified = false;
  bool ip_solved = false;
};

enum class CgStatus { converged, iteration_limit, inconclusive };
const char* to_string(CgStatus status);

struct ColumnGenerationResult {
  ContinuousDesign design;
  /// Full-scope when converged, else the last restricted certificate.
  DualCertificate certificate;
  std::vector<CgTraceEntry> trace;
  CgStatus status = CgStatus::iteration_limit;
  /// Smallest certified upper bound seen, if any exact pricing finished.
  std::optional<double> best_upper_bound;
  std::int64_t ip_calls = 0;
  std::int64_t master_iterations = 0;
};

/// Column generation for the continuous relaxation.
ColumnGenerationResult column_generation(const Instance& instance, const Pricer& pricer,
                                         const ColumnGenerationParams& params = {});

}  // namespace dopt

#endif  // DOPT_RELAXATION_HPP

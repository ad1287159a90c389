#ifndef DOPT_PRICING_HPP
#define DOPT_PRICING_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dopt/model.hpp"

namespace dopt {

/// Outcome of maximizing p(x)^T G p(x) over the experiment space.
struct PricingResult {
  Experiment x;
  double value = -std::numeric_limits<double>::infinity();
  /// True iff value is the proven optimum.
  bool exact = false;
  std::int64_t nodes = 0;
  /// Proven upper bound on the optimum; +inf when nothing was proven. Equals
  /// `value` for exact results and the early-exit target when the search only
  /// proved that nothing exceeds it.
  double upper_bound = std::numeric_limits<double>::infinity();
  /// The node limit or enumeration cap stopped the search.
  bool limit_hit = false;
};

double pricing_objective(const Eigen::MatrixXd& g, const MonomialModel& model,
                         const Experiment& x);

/// First-improvement ascent over the bit-flip (x +/- e_i) and bit-swap
/// (x + e_i - e_j) neighborhoods, restricted to the space. Neighbors are
/// scanned by increasing i (+1 before -1), then swaps (i, j) in lexicographic
/// order; the scan restarts after every accepted move.
PricingResult heuristic_search(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                               const MonomialModel& model, const Experiment& start);

/// Exhaustive maximization; ties go to the lexicographically smallest x.
/// Throws SolverLimit when L^d exceeds `cap`.
PricingResult solve_enum(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                         const MonomialModel& model, std::uint64_t cap = std::uint64_t{1} << 24);

/// Binary reformulation of the pricing problem. Factor j is written as
/// sum_b 2^b z_{j,b} with ceil(log2 L) bits; the objective becomes a multilinear
/// polynomial in the bits and every term of degree >= 2 gets an auxiliary
/// variable with its McCormick envelope
///
///   0 <= y <= z_j  (j in I),   y >= sum_{j in I} z_j - |I| + 1.
///
/// Variables are ordered bits first, then auxiliaries.
struct LinearizedProgram {
  enum class RowKind { side, level_cap, envelope_upper, envelope_lower };

  struct Row {
    std::vector<std::pair<int, double>> coef;
    double rhs = 0.0;
    RowKind kind = RowKind::side;
    int aux = -1;  // owning auxiliary variable for envelope rows
  };

  int num_factors = 0;
  int levels = 2;
  int bits_per_factor = 1;
  int num_bits = 0;
  /// Sorted bit indices of each auxiliary variable's product.
  std::vector<std::vector<int>> aux_support;
  std::vector<double> objective;  // one entry per variable
  double objective_constant = 0.0;
  std::vector<Row> rows;
  std::vector<double> lower, upper;  // variable bounds

  int num_vars() const { return num_bits + static_cast<int>(aux_support.size()); }
  int bit(int factor, int b) const { return factor * bits_per_factor + b; }

  std::vector<int> encode(const Experiment& x) const;
  Experiment decode(const std::vector<int>& bits) const;
  /// Full variable vector (bits and exact products) for a bit assignment.
  std::vector<double> lift(const std::vector<int>& bits) const;
  /// Objective of the linear program at the lifted point.
  double evaluate(const std::vector<int>& bits) const;
  /// True iff every row holds at `vars` within tol.
  bool satisfies(const std::vector<double>& vars, double tol = 1e-9) const;
};

/// Throws std::invalid_argument for model order > 2.
LinearizedProgram build_linearization(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                                      const MonomialModel& model);

/// Optimal value of the root LP relaxation of the linearization, an upper
/// bound on the pricing optimum.
double linearization_lp_bound(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                              const MonomialModel& model);

struct BranchAndBoundOptions {
  std::int64_t node_limit = 1'000'000;
  int lp_iteration_limit = 5000;
};

/// Exact maximization by depth-first branch-and-bound on the most fractional
/// bit, bounding with the LP relaxation of the linearization (dual simplex,
/// warm-started from the parent node). With a target the search returns as
/// soon as a point with value > target is known (exact = false), and prunes
/// nodes whose bound does not exceed the target.
PricingResult solve_bb(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                       const MonomialModel& model,
                       const std::optional<PricingResult>& incumbent = std::nullopt,
                       std::optional<double> target = std::nullopt,
                       const BranchAndBoundOptions& options = {});

enum class ExactMethod { branch_and_bound, enumeration };

struct PricingOptions {
  ExactMethod exact = ExactMethod::branch_and_bound;
  bool use_heuristic = true;
  BranchAndBoundOptions bb;
  std::uint64_t enum_cap = std::uint64_t{1} << 24;
};

/// Pricing oracle bound to one space and model, shared by the local search
/// and the column generation.
class Pricer {
 public:
  Pricer(const ExperimentSpace& space, const MonomialModel& model, PricingOptions options = {});

  PricingResult heuristic(const Eigen::MatrixXd& g, const Experiment& start) const;
  PricingResult exact(const Eigen::MatrixXd& g,
                      const std::optional<PricingResult>& incumbent = std::nullopt,
                      std::optional<double> target = std::nullopt) const;

  const PricingOptions& options() const { return options_; }
  const ExperimentSpace& space() const { return space_; }
  const MonomialModel& model() const { return model_; }

 private:
  ExperimentSpace space_;
  MonomialModel model_;
  PricingOptions options_;
};

}  // namespace dopt

#endif  // DOPT_PRICING_HPP

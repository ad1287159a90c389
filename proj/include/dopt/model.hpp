#ifndef DOPT_MODEL_HPP
#define DOPT_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dopt {

/// An experiment: one level in {0, ..., L-1} per factor.
using Experiment = std::vector<int>;

/// Vector of monomial evaluations p(x). Entries are integers stored exactly
/// in double precision.
using DesignPoint = Eigen::VectorXd;

/// Exact rational with a positive, reduced denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n) {}  // NOLINT: implicit from integers
  Rational(std::int64_t n, std::int64_t d);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }

  friend bool operator==(const Rational&, const Rational&) = default;
};

/// One side constraint row . x <= rhs.
struct LinearConstraint {
  std::vector<Rational> row;
  Rational rhs;

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

/// The allowable experiments: the box {0..L-1}^d cut by A x <= b, optionally
/// with x_1 = 1 enforced.
class ExperimentSpace {
 public:
  ExperimentSpace(int d, int levels, std::vector<LinearConstraint> constraints = {},
                  bool fixed_first = false);

  int dim() const { return d_; }
  int levels() const { return levels_; }
  bool fixed_first() const { return fixed_first_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  bool contains(const Experiment& x) const;

  // Number of box points L^d, saturating at UINT64_MAX.
  std::uint64_t box_size() const;

  friend bool operator==(const ExperimentSpace& a, const ExperimentSpace& b) {
    return a.d_ == b.d_ && a.levels_ == b.levels_ && a.fixed_first_ == b.fixed_first_ &&
           a.constraints_ == b.constraints_;
  }

 private:
  int d_;
  int levels_;
  bool fixed_first_;
  std::vector<LinearConstraint> constraints_;
  // Each constraint multiplied by the lcm of its denominators; membership is
  // decided in exact integer arithmetic.
  std::vector<std::vector<std::int64_t>> scaled_rows_;
  std::vector<std::int64_t> scaled_rhs_;
};

/// Ordered list of distinct monomials; exponents[i][j] is the degree of x_j in
/// monomial i.
class MonomialModel {
 public:
  MonomialModel(int d, std::vector<std::vector<int>> exponents);

  int num_factors() const { return d_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  int order() const { return order_; }
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  DesignPoint evaluate(const Experiment& x) const;

  friend bool operator==(const MonomialModel&, const MonomialModel&) = default;

 private:
  int d_;
  std::vector<std::vector<int>> exponents_;
  int order_;
};

struct Instance {
  ExperimentSpace space;
  MonomialModel model;
  int k;
  std::optional<std::uint64_t> seed;
  std::string generator = "custom";

  Instance(ExperimentSpace s, MonomialModel m, int budget,
           std::optional<std::uint64_t> seed_ = std::nullopt, std::string gen = "custom");

  int p() const { return model.size(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

DesignPoint eval_design_point(const MonomialModel& model, const Experiment& x);

/// {1, x_1, ..., x_d}.
MonomialModel build_full_first_order(int d);

/// Constant, all degree-one monomials, then x_l x_j for l < j in
/// {2, ..., floor(d/2)+1} (1-based) in lexicographic order.
MonomialModel build_second_order_pairs(int d);

/// Substitutes x_1 = 1 into every monomial and drops monomials that become
/// duplicates of an earlier one. Under x_1 = 1 the monomial x_1 coincides with
/// the constant, so a first-order model on {x : x_1 = 1} loses that column.
MonomialModel fix_first_factor(const MonomialModel& model);

// Generators. k defaults to 2p when not given.
Instance generate_cardinality_instance(int d, std::optional<int> k = std::nullopt);
Instance generate_knapsack_instance(int d, std::optional<int> k, std::uint64_t seed);
Instance generate_second_order_knapsack_instance(int d, std::optional<int> k, std::uint64_t seed);

/// Full first-order model on the whole box {0..L-1}^d with no side constraints.
Instance generate_unconstrained_instance(int d, std::optional<int> k = std::nullopt,
                                         int levels = 2);

/// Two knapsack rows as used by the knapsack generators (a_{i1} = 0, 80% of
/// the remaining entries in {0..5}, rounded up, the rest in {20..30}, positions
/// shuffled; rhs = half the row sum).
std::vector<LinearConstraint> generate_knapsack_constraints(int d, std::uint64_t seed);

/// All members of the space in lexicographic order (small spaces only).
std::vector<Experiment> enumerate_space(const ExperimentSpace& space,
                                        std::uint64_t cap = std::uint64_t{1} << 24);

}  // namespace dopt

#endif  // DOPT_MODEL_HPP

#ifndef DOPT_LOCAL_SEARCH_HPP
#define DOPT_LOCAL_SEARCH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dopt/linalg.hpp"
#include "dopt/model.hpp"
#include "dopt/pricing.hpp"
#include "dopt/rng.hpp"

namespace dopt {

/// Integer design: a multiset of k experiments and its information matrix.
/// Design points are integer vectors, so S is kept exactly by adding and
/// subtracting outer products; only the factorization is floating point.
class Design {
 public:
  Design(MonomialModel model, int k, std::map<Experiment, int> support);

  const MonomialModel& model() const { return model_; }
  int k() const { return k_; }
  const std::map<Experiment, int>& support() const { return support_; }
  const InfoMatrix& info() const { return info_; }
  double logdet() const { return info_.logdet(); }

  /// Remove one copy of `out`, add one copy of `in`.
  void exchange(const Experiment& out, const Experiment& in);

  /// Support in scan order: decreasing multiplicity, ties lexicographic.
  std::vector<Experiment> scan_order() const;

  /// Max abs difference between the cached S and a recomputation from the
  /// support.
  double consistency_error() const;

 private:
  MonomialModel model_;
  int k_;
  std::map<Experiment, int> support_;
  InfoMatrix info_;
};

Eigen::MatrixXd information_matrix(const MonomialModel& model,
                                   const std::map<Experiment, int>& support);

/// Draws a feasible experiment: each factor uniform over its bit patterns,
/// x_1 = 1 under fixed_first, rejected when a level is >= L or a side
/// constraint fails. Returns nullopt after `cap` draws counted in `used`.
std::optional<Experiment> sample_feasible(const ExperimentSpace& space, Rng& rng,
                                          std::uint64_t cap, std::uint64_t& used);

/// Random rank-p design of size k. Throws DegenerateInstance when `cap`
/// samples do not reach rank p.
Design initial_design(const Instance& instance, std::uint64_t seed,
                      std::uint64_t cap = 100'000);

struct LocalSearchOptions {
  /// Minimum relative logdet gain, gain > tol_improve * max(1, |logdet|).
  double tol_improve = 1e-9;
  std::int64_t max_moves = 1'000'000;
  PricingOptions pricing;
  std::uint64_t sample_cap = 100'000;
};

enum class MoveKind { heuristic, ip };
const char* to_string(MoveKind kind);

struct Exchange {
  Experiment out, in;
  double new_logdet = 0.0;
  MoveKind kind = MoveKind::heuristic;
};

struct StepOutcome {
  std::optional<Exchange> move;
  /// Some support point could not be certified (pricing hit a limit).
  bool inconclusive = false;
  int ip_calls = 0;
};

/// One scan over the support in scan order. For each x' the pricing matrix
/// of S - p(x')p(x')^T is built, the heuristic is run from x', and the exact
/// solver is called with the improving threshold only when the heuristic
/// finds nothing. Returns the first improving exchange.
StepOutcome exchange_step(const Design& design, const Pricer& pricer,
                          const LocalSearchOptions& options = {});

struct TraceEntry {
  std::int64_t iteration = 0;
  double logdet = 0.0;
  MoveKind kind = MoveKind::heuristic;
};

struct LocalSearchReport {
  std::int64_t iterations = 0;  // accepted exchanges
  std::int64_t heuristic_moves = 0;
  std::int64_t ip_calls = 0;
  std::int64_t scans = 0;
  double initial_logdet = 0.0;
  double final_logdet = 0.0;
  std::vector<TraceEntry> trace;
  /// Every support point of the final design was certified by an exact solve.
  bool proved_local_optimum = false;
  /// The final scan had a pricing call that stopped on a limit.
  bool inconclusive = false;
  bool move_limit_hit = false;
};

std::pair<Design, LocalSearchReport> run_local_search(const Instance& instance,
                                                      std::uint64_t seed,
                                                      const LocalSearchOptions& options = {});
std::pair<Design, LocalSearchReport> run_local_search(const Instance& instance,
                                                      Design warm_start,
                                                      const LocalSearchOptions& options = {});

/// ((k-p+1)/k * p/(p+k(rho-1)))^p.
double guarantee_factor(int k, int p, double rho);

}  // namespace dopt

#endif  // DOPT_LOCAL_SEARCH_HPP

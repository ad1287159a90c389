#ifndef DOPT_BENCH_HPP
#define DOPT_BENCH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dopt/local_search.hpp"
#include "dopt/relaxation.hpp"

namespace dopt {

struct BruteForceResult {
  double optimum_logdet = 0.0;
  Design optimal_design;
  std::int64_t multisets_examined = 0;
};

/// Exhaustive search over all size-k multisets of the space. Ties keep the
/// first multiset in lexicographic order of (sorted) experiment indices.
/// Throws SolverLimit when C(|Y|+k-1, k) exceeds `cap` and DegenerateInstance
/// when no multiset has rank p.
BruteForceResult brute_force_dopt(const Instance& instance,
                                  std::uint64_t cap = 10'000'000);

/// C(n+k-1, k), saturating at UINT64_MAX.
std::uint64_t multiset_count(std::uint64_t n, std::uint64_t k);

enum class Variant { cardinality, knapsack, second_order, unconstrained };
const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

Instance make_instance(Variant v, int d, std::optional<int> k, std::uint64_t seed);

struct SuiteRow {
  Variant variant = Variant::knapsack;
  int d = 0;
  int p = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double ls_value = 0.0;
  /// Certified upper bound from column generation (NaN if none).
  double relax_value = 0.0;
  double gap = 0.0;
  double ls_time = 0.0;
  double cg_time = 0.0;
  std::int64_t ip_calls = 0;    // local search
  std::int64_t iterations = 0;  // local search accepted exchanges
  std::int64_t cg_iterations = 0;
  std::int64_t cg_ip_calls = 0;
  /// "ok", or the failure that stopped the row.
  std::string status = "ok";
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
};

struct SuiteOptions {
  /// k as a function of p; default 2p.
  std::function<int(int)> k_rule = [](int p) { return 2 * p; };
  LocalSearchOptions local_search;
  ColumnGenerationParams column_generation;
  int threads = 1;
};

/// One row per (d, seed), sorted by (d, seed). A failing row records its
/// error in `status` and does not stop the suite.
SuiteReport run_suite(Variant variant, const std::vector<int>& d_values,
                      const std::vector<std::uint64_t>& seeds, const SuiteOptions& options = {});

}  // namespace dopt

#endif  // DOPT_BENCH_HPP

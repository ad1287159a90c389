#include <cstdint>

#include "doctest.h"
#include "dopt/bench.hpp"
#include "dopt/errors.hpp"
#include "oracles.hpp"

using namespace dopt;

TEST_CASE("multiset counts") {
  CHECK(multiset_count(8, 4) == 330);  // d=3 unconstrained, k=4: C(11,4)
  CHECK(multiset_count(1, 9) == 1);
  CHECK(multiset_count(5, 0) == 1);
  CHECK(multiset_count(10, 3) == 220);
  CHECK(multiset_count(1000, 1000) == UINT64_MAX);
}

TEST_CASE("brute force agrees with the stars-and-bars oracle") {
  std::vector<Instance> cases;
  for (std::uint64_t seed : {1u, 6u, 10u})
    for (int k : {4, 5, 6}) cases.push_back(generate_knapsack_instance(4, k, seed));
  cases.push_back(generate_unconstrained_instance(2, 4));
  cases.push_back(generate_unconstrained_instance(3, 4));
  cases.push_back(generate_second_order_knapsack_instance(4, 5, 151));
  for (const auto& inst : cases) {
    const auto want = oracle::brute_force(inst);
    const auto got = brute_force_dopt(inst);
    CHECK(got.optimum_logdet == doctest::Approx(want.optimum).epsilon(1e-10));
    CHECK(got.multisets_examined == want.count);
    CHECK(got.optimal_design.logdet() == doctest::Approx(want.optimum).epsilon(1e-10));
    CHECK(got.optimal_design.k() == inst.k);
  }
  CHECK(brute_force_dopt(generate_unconstrained_instance(3, 4)).multisets_examined == 330);
}

TEST_CASE("brute force limits") {
  CHECK_THROWS_AS(brute_force_dopt(generate_unconstrained_instance(5, 12), 1000), SolverLimit);
  CHECK_THROWS_AS(brute_force_dopt(generate_cardinality_instance(3)), DegenerateInstance);
}

TEST_CASE("variant names") {
  for (Variant v : {Variant::cardinality, Variant::knapsack, Variant::second_order,
                    Variant::unconstrained})
    CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_variant("quadratic"), std::invalid_argument);
  CHECK(make_instance(Variant::second_order, 11, std::nullopt, 7) ==
        generate_second_order_knapsack_instance(11, std::nullopt, 7));
}

TEST_CASE("suite rows are sorted, bounded and independent of the thread count") {
  SuiteOptions one, many;
  many.threads = 3;
  const std::vector<int> ds{9, 5};
  const std::vector<std::uint64_t> seeds{135, 2, 1};
  const auto a = run_suite(Variant::knapsack, ds, seeds, one);
  const auto b = run_suite(Variant::knapsack, ds, seeds, many);
  REQUIRE(a.rows.size() == 6);
  REQUIRE(b.rows.size() == 6);
  int ok = 0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& r = a.rows[i];
    if (i) CHECK(std::pair(a.rows[i - 1].d, a.rows[i - 1].seed) < std::pair(r.d, r.seed));
    CHECK(r.d == b.rows[i].d);
    CHECK(r.seed == b.rows[i].seed);
    CHECK(r.status == b.rows[i].status);
    if (r.status != "ok") {
      CHECK(r.status.rfind("degenerate", 0) == 0);
      continue;
    }
    ++ok;
    CHECK(r.k == 2 * r.p);
    CHECK(r.ls_value == b.rows[i].ls_value);
    CHECK(r.relax_value == b.rows[i].relax_value);
    CHECK(r.gap == doctest::Approx(r.relax_value - r.ls_value));
    CHECK(r.gap >= 0.0);
  }
  CHECK(ok == 3);  // d=9 seeds 1 and 2 and d=5 seed 1 are rank deficient
}

#include <random>

#include "doctest.h"
#include "dopt/errors.hpp"
#include "dopt/pricing.hpp"
#include "oracles.hpp"

using namespace dopt;

namespace {

Eigen::MatrixXd random_symmetric(int p, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) g(i, j) = g(j, i) = nd(gen);
  return g;
}

struct Case {
  ExperimentSpace space;
  MonomialModel model;
};

Case make_case(int which, std::mt19937_64& gen) {
  switch (which % 5) {
    case 0: {
      const auto inst = generate_knapsack_instance(7, std::nullopt, 1 + gen() % 50);
      return {inst.space, inst.model};
    }
    case 1: {
      const auto inst = generate_second_order_knapsack_instance(7, std::nullopt, 1 + gen() % 50);
      return {inst.space, inst.model};
    }
    case 2: {
      const auto inst = generate_cardinality_instance(6, 12);
      return {inst.space, inst.model};
    }
    case 3: {
      const auto inst = generate_unconstrained_instance(4, std::nullopt, 3);
      return {inst.space, inst.model};
    }
    default: {
      const auto inst = generate_unconstrained_instance(6);
      return {inst.space, inst.model};
    }
  }
}

}  // namespace

TEST_CASE("pricing objective is the quadratic form") {
  const auto m = build_full_first_order(3);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
  CHECK(pricing_objective(g, m, {1, 1, 0}) == doctest::Approx(3.0));
}

TEST_CASE("enumeration and branch-and-bound match the oracle") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = make_case(trial, gen);
    Eigen::MatrixXd g = random_symmetric(c.model.size(), gen);
    if (trial % 2) g = oracle::random_psd(c.model.size(), gen);
    const auto want = oracle::pricing(g, c.space, c.model);
    const auto e = solve_enum(g, c.space, c.model);
    CHECK(e.exact);
    CHECK(e.value == doctest::Approx(want.value).epsilon(1e-10));
    CHECK(e.x == want.x);
    const auto b = solve_bb(g, c.space, c.model);
    CHECK(b.exact);
    CHECK_FALSE(b.limit_hit);
    CHECK(b.value == doctest::Approx(want.value).epsilon(1e-9));
    CHECK(c.space.contains(b.x));
    CHECK(pricing_objective(g, c.model, b.x) == doctest::Approx(b.value).epsilon(1e-12));
    CHECK(b.upper_bound == b.value);
  }
}

TEST_CASE("heuristic returns a feasible local optimum no better than the optimum") {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = make_case(trial, gen);
    const Eigen::MatrixXd g = random_symmetric(c.model.size(), gen);
    const auto members = oracle::members(c.space);
    const Experiment start = members[gen() % members.size()];
    const auto h = heuristic_search(g, c.space, c.model, start);
    CHECK(c.space.contains(h.x));
    CHECK_FALSE(h.exact);
    CHECK(h.value >= pricing_objective(g, c.model, start) - 1e-12);
    CHECK(h.value <= oracle::pricing(g, c.space, c.model).value + 1e-9);
    // no single flip or swap improves
    const int d = c.space.dim();
    for (int i = 0; i < d; ++i)
      for (int j = -1; j < d; ++j)
        for (int s : {-1, 1}) {
          Experiment y = h.x;
          y[i] += s;
          if (j >= 0 && j != i) y[j] -= s;
          if (j == i) continue;
          if (c.space.contains(y)) CHECK(pricing_objective(g, c.model, y) <= h.value + 1e-12);
        }
  }
}

TEST_CASE("linearization is exact on integer points and its LP bounds the optimum") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Case c = make_case(trial, gen);
    const Eigen::MatrixXd g = random_symmetric(c.model.size(), gen);
    const auto lin = build_linearization(g, c.space, c.model);
    for (const auto& x : oracle::members(c.space)) {
      const auto bits = lin.encode(x);
      CHECK(lin.decode(bits) == x);
      CHECK(lin.satisfies(lin.lift(bits)));
      CHECK(lin.evaluate(bits) == doctest::Approx(pricing_objective(g, c.model, x)).epsilon(1e-10));
    }
    CHECK(linearization_lp_bound(g, c.space, c.model) >=
          oracle::pricing(g, c.space, c.model).value - 1e-9);
  }
  const auto cubic = MonomialModel(2, {{0, 0}, {3, 0}});
  CHECK_THROWS_AS(build_linearization(Eigen::MatrixXd::Identity(2, 2), ExperimentSpace(2, 2), cubic),
                  std::invalid_argument);
}

TEST_CASE("three-level factors use two bits with a level cap") {
  const auto inst = generate_unconstrained_instance(3, std::nullopt, 3);
  const auto lin = build_linearization(Eigen::MatrixXd::Identity(4, 4), inst.space, inst.model);
  CHECK(lin.bits_per_factor == 2);
  CHECK(lin.num_bits == 6);
  CHECK_FALSE(lin.satisfies(lin.lift({1, 1, 0, 0, 0, 0})));
}

TEST_CASE("target stops early or certifies that nothing beats it") {
  std::mt19937_64 gen(24);
  for (int trial = 0; trial < 30; ++trial) {
    const Case c = make_case(trial, gen);
    const Eigen::MatrixXd g = random_symmetric(c.model.size(), gen);
    const double opt = oracle::pricing(g, c.space, c.model).value;

    const auto above = solve_bb(g, c.space, c.model, std::nullopt, opt + 0.5);
    CHECK_FALSE(above.exact);
    CHECK(above.upper_bound == doctest::Approx(opt + 0.5));
    CHECK(above.value <= opt + 1e-9);

    const auto below = solve_bb(g, c.space, c.model, std::nullopt, opt - 0.5);
    CHECK(below.value > opt - 0.5);
    CHECK(c.space.contains(below.x));
  }
}

TEST_CASE("node limit is reported") {
  const auto inst = generate_second_order_knapsack_instance(9, std::nullopt, 3);
  std::mt19937_64 gen(25);
  const Eigen::MatrixXd g = random_symmetric(inst.p(), gen);
  const auto r = solve_bb(g, inst.space, inst.model, std::nullopt, std::nullopt, {1, 5000});
  CHECK(r.limit_hit);
  CHECK_FALSE(r.exact);
}

TEST_CASE("pricer dispatches on the exact method") {
  const auto inst = generate_knapsack_instance(6, std::nullopt, 2);
  std::mt19937_64 gen(26);
  const Eigen::MatrixXd g = random_symmetric(inst.p(), gen);
  const Pricer bb(inst.space, inst.model);
  const Pricer en(inst.space, inst.model, {ExactMethod::enumeration});
  CHECK(bb.exact(g).value == doctest::Approx(en.exact(g).value));
  const Pricer tiny(inst.space, inst.model, {ExactMethod::enumeration, true, {}, 4});
  CHECK_THROWS_AS(tiny.exact(g), SolverLimit);
}

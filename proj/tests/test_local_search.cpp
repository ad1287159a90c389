#include "doctest.h"
#include "dopt/errors.hpp"
#include "dopt/local_search.hpp"
#include "oracles.hpp"

using namespace dopt;

namespace {

double oracle_logdet(const Instance& inst, const std::map<Experiment, int>& support) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(inst.p(), inst.p());
  for (const auto& [x, m] : support) {
    const Eigen::VectorXd v = oracle::design_point(inst.model, x);
    s += m * v * v.transpose();
  }
  return oracle::logdet(s);
}

// Best single exchange over every (support point, member) pair.
double best_exchange(const Instance& inst, const Design& d) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [out, m] : d.support())
    for (const auto& in : oracle::members(inst.space)) {
      auto s = d.support();
      if (--s[out] == 0) s.erase(out);
      ++s[in];
      best = std::max(best, oracle_logdet(inst, s));
    }
  return best;
}

}  // namespace

TEST_CASE("design keeps S in sync through exchanges") {
  const auto inst = generate_knapsack_instance(5, std::nullopt, 2);
  auto d = initial_design(inst, 3);
  CHECK(d.logdet() == doctest::Approx(oracle_logdet(inst, d.support())).epsilon(1e-10));
  const auto members = oracle::members(inst.space);
  for (int t = 0; t < 30; ++t) {
    const auto out = d.scan_order()[t % d.support().size()];
    d.exchange(out, members[(7 * t) % members.size()]);
    CHECK(d.consistency_error() == 0.0);
  }
  int total = 0;
  for (const auto& [x, m] : d.support()) total += m;
  CHECK(total == inst.k);
  CHECK_THROWS_AS(d.exchange({0, 0, 0, 0, 0, 0}, members[0]), std::invalid_argument);
}

TEST_CASE("scan order is by decreasing multiplicity, then lexicographic") {
  const auto m = build_full_first_order(2);
  const Design d(m, 6, {{{0, 0}, 1}, {{0, 1}, 2}, {{1, 0}, 2}, {{1, 1}, 1}});
  const std::vector<Experiment> want{{0, 1}, {1, 0}, {0, 0}, {1, 1}};
  CHECK(d.scan_order() == want);
}

TEST_CASE("initial design is seeded, feasible and full rank") {
  const auto inst = generate_knapsack_instance(8, std::nullopt, 544);
  const auto a = initial_design(inst, 5);
  const auto b = initial_design(inst, 5);
  CHECK(a.support() == b.support());
  CHECK(a.info().full_rank());
  for (const auto& [x, m] : a.support()) CHECK(inst.space.contains(x));
  CHECK_THROWS_AS(initial_design(generate_cardinality_instance(3), 1), DegenerateInstance);
}

TEST_CASE("sampler honors the first-factor convention") {
  const auto inst = generate_knapsack_instance(6, std::nullopt, 1);
  Rng rng(4);
  std::uint64_t used = 0;
  for (int i = 0; i < 50; ++i) {
    const auto x = sample_feasible(inst.space, rng, 1000, used);
    REQUIRE(x);
    CHECK((*x)[0] == 1);
    CHECK(inst.space.contains(*x));
  }
}

TEST_CASE("an exchange step improves by exactly what it reports") {
  const auto inst = generate_knapsack_instance(9, std::nullopt, 135);
  const Pricer pricer(inst.space, inst.model);
  const auto d = initial_design(inst, 9);
  const auto step = exchange_step(d, pricer);
  REQUIRE(step.move);
  auto s = d.support();
  if (--s[step.move->out] == 0) s.erase(step.move->out);
  ++s[step.move->in];
  CHECK(step.move->new_logdet == doctest::Approx(oracle_logdet(inst, s)).epsilon(1e-10));
  CHECK(step.move->new_logdet > d.logdet());
}

TEST_CASE("local search ends in a local optimum that no exchange improves") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (int variant = 0; variant < 3; ++variant) {
      const Instance inst = variant == 0   ? generate_knapsack_instance(5, std::nullopt, 3)
                            : variant == 1 ? generate_unconstrained_instance(4)
                                           : generate_second_order_knapsack_instance(5, std::nullopt, 2);
      LocalSearchOptions opts;
      const auto [d, rep] = run_local_search(inst, seed, opts);
      CHECK(rep.proved_local_optimum);
      CHECK_FALSE(rep.inconclusive);
      CHECK(rep.final_logdet == doctest::Approx(oracle_logdet(inst, d.support())).epsilon(1e-10));
      const double best = best_exchange(inst, d);
      CHECK(best <= d.logdet() + opts.tol_improve * std::max(1.0, std::abs(d.logdet())) + 1e-12);
      for (std::size_t i = 1; i < rep.trace.size(); ++i)
        CHECK(rep.trace[i].logdet > rep.trace[i - 1].logdet);
      CHECK(rep.iterations == static_cast<std::int64_t>(rep.trace.size()));
      CHECK(rep.iterations >= rep.heuristic_moves);
    }
  }
}

TEST_CASE("enumeration pricing also certifies its end point") {
  // paths differ: with a target, branch-and-bound stops at the first improving
  // point while enumeration returns the best one
  const auto inst = generate_knapsack_instance(9, std::nullopt, 384);
  LocalSearchOptions en;
  en.pricing.exact = ExactMethod::enumeration;
  const auto [d, rep] = run_local_search(inst, 2, en);
  CHECK(rep.proved_local_optimum);
  CHECK(best_exchange(inst, d) <= d.logdet() + 1e-9 * std::abs(d.logdet()) + 1e-12);
}

TEST_CASE("warm start from a local optimum makes no moves") {
  const auto inst = generate_knapsack_instance(9, std::nullopt, 384);
  const auto [d, rep] = run_local_search(inst, 2);
  const auto [d2, rep2] = run_local_search(inst, d);
  CHECK(rep2.iterations == 0);
  CHECK(rep2.proved_local_optimum);
  CHECK(d2.support() == d.support());
}

TEST_CASE("move limit is reported") {
  const auto inst = generate_knapsack_instance(9, std::nullopt, 489);
  LocalSearchOptions opts;
  opts.max_moves = 1;
  const auto [d, rep] = run_local_search(inst, 1, opts);
  CHECK(rep.move_limit_hit);
  CHECK(rep.iterations == 1);
  CHECK_FALSE(rep.proved_local_optimum);
}

TEST_CASE("guarantee factor") {
  CHECK(guarantee_factor(8, 4, 1.0) == doctest::Approx(oracle::guarantee(8, 4, 1.0)));
  CHECK(guarantee_factor(8, 4, 1.0) == doctest::Approx(std::pow(5.0 / 8.0, 4)));
  CHECK(guarantee_factor(20, 5, M_PI / 2) == doctest::Approx(oracle::guarantee(20, 5, M_PI / 2)));
}

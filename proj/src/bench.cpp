#include "dopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "dopt/errors.hpp"

namespace dopt {

std::uint64_t multiset_count(std::uint64_t n, std::uint64_t k) {
  if (n == 0) return k == 0 ? 1 : 0;
  // C(n+k-1, k) built incrementally; every partial product is a binomial.
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - 1 + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

BruteForceResult brute_force_dopt(const Instance& instance, std::uint64_t cap) {
  const std::vector<Experiment> ys = enumerate_space(instance.space);
  const auto n = static_cast<int>(ys.size());
  const int k = instance.k;
  const int p = instance.p();
  if (multiset_count(ys.size(), k) > cap)
    throw SolverLimit("brute force: C(|Y|+k-1, k) exceeds the cap of " + std::to_string(cap));

  std::vector<DesignPoint> pts;
  std::vector<Eigen::MatrixXd> outer;
  for (const auto& x : ys) {
    pts.push_back(instance.model.evaluate(x));
    outer.push_back(pts.back() * pts.back().transpose());
  }

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(p);
  std::vector<int> pick(k, 0), best_pick;
  double best = -std::numeric_limits<double>::infinity();
  std::int64_t examined = 0;

  auto score = [&]() {
    ldlt.compute(s);
    const Eigen::VectorXd dg = ldlt.vectorD();
    const double top = dg.maxCoeff();
    if (!(top > 0.0) || dg.minCoeff() <= kRankTolerance * top)
      return -std::numeric_limits<double>::infinity();
    return dg.array().log().sum();
  };

  // Depth-first over nondecreasing index sequences.
  auto dfs = [&](auto&& self, int depth, int from) -> void {
    if (depth == k) {
      ++examined;
      const double v = score();
      if (std::isfinite(v) && (best_pick.empty() || v > best + 1e-12 * std::max(1.0, std::abs(best)))) {
        best = v;
        best_pick = pick;
      }
      return;
    }
    for (int i = from; i < n; ++i) {
      pick[depth] = i;
      s += outer[i];
      self(self, depth + 1, i);
      s -= outer[i];
    }
  };
  if (n > 0) dfs(dfs, 0, 0);

  if (best_pick.empty())
    throw DegenerateInstance("brute force: no size-k multiset has rank p");
  std::map<Experiment, int> support;
  for (int i : best_pick) ++support[ys[i]];
  BruteForceResult res{best, Design(instance.model, k, std::move(support)), examined};
  res.optimum_logdet = res.optimal_design.logdet();
  return res;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::cardinality:
      return "cardinality";
    case Variant::knapsack:
      return "knapsack";
    case Variant::second_order:
      return "second_order";
    case Variant::unconstrained:
      return "unconstrained";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::cardinality, Variant::knapsack, Variant::second_order,
                    Variant::unconstrained})
    if (name == to_string(v)) return v;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

Instance make_instance(Variant v, int d, std::optional<int> k, std::uint64_t seed) {
  switch (v) {
    case Variant::cardinality:
      return generate_cardinality_instance(d, k);
    case Variant::knapsack:
      return generate_knapsack_instance(d, k, seed);
    case Variant::second_order:
      return generate_second_order_knapsack_instance(d, k, seed);
    case Variant::unconstrained:
      return generate_unconstrained_instance(d, k);
  }
  throw std::invalid_argument("unknown variant");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SuiteRow run_row(Variant variant, int d, std::uint64_t seed, const SuiteOptions& options) {
  SuiteRow row;
  row.variant = variant;
  row.d = d;
  row.seed = seed;
  row.relax_value = std::numeric_limits<double>::quiet_NaN();
  row.ls_value = std::numeric_limits<double>::quiet_NaN();
  row.gap = std::numeric_limits<double>::quiet_NaN();
  try {
    const int p = make_instance(variant, d, std::nullopt, seed).p();
    const Instance inst = make_instance(variant, d, options.k_rule(p), seed);
    row.p = inst.p();
    row.k = inst.k;

    auto t0 = std::chrono::steady_clock::now();
    const auto [design, report] = run_local_search(inst, seed, options.local_search);
    row.ls_time = seconds_since(t0);
    row.ls_value = report.final_logdet;
    row.ip_calls = report.ip_calls;
    row.iterations = report.iterations;
    if (report.inconclusive) row.status = "ls_inconclusive";

    ColumnGenerationParams cg = options.column_generation;
    cg.seed = seed;
    const Pricer pricer(inst.space, inst.model, options.local_search.pricing);
    t0 = std::chrono::steady_clock::now();
    const auto res = column_generation(inst, pricer, cg);
    row.cg_time = seconds_since(t0);
    row.cg_iterations = static_cast<std::int64_t>(res.trace.size()) - 1;
    row.cg_ip_calls = res.ip_calls;
    if (res.status == CgStatus::converged)
      row.relax_value = res.certificate.objective;
    else if (res.best_upper_bound)
      row.relax_value = *res.best_upper_bound;
    if (res.status != CgStatus::converged)
      row.status = std::string("cg_") + to_string(res.status);
    row.gap = row.relax_value - row.ls_value;
  } catch (const DegenerateInstance& e) {
    row.status = std::string("degenerate: ") + e.what();
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

SuiteReport run_suite(Variant variant, const std::vector<int>& d_values,
                      const std::vector<std::uint64_t>& seeds, const SuiteOptions& options) {
  std::vector<std::pair<int, std::uint64_t>> jobs;
  for (int d : d_values)
    for (std::uint64_t s : seeds) jobs.emplace_back(d, s);
  std::sort(jobs.begin(), jobs.end());
  jobs.erase(std::unique(jobs.begin(), jobs.end()), jobs.end());

  SuiteReport report;
  report.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      report.rows[i] = run_row(variant, jobs[i].first, jobs[i].second, options);
  };
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

}  // namespace dopt

#include "dopt/model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "dopt/errors.hpp"
#include "dopt/rng.hpp"

namespace dopt {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

ExperimentSpace::ExperimentSpace(int d, int levels, std::vector<LinearConstraint> constraints,
                                 bool fixed_first)
    : d_(d), levels_(levels), fixed_first_(fixed_first), constraints_(std::move(constraints)) {
  if (d_ < 1) throw std::invalid_argument("experiment space needs d >= 1");
  if (levels_ < 2) throw std::invalid_argument("experiment space needs L >= 2");
  for (const auto& c : constraints_) {
    if (static_cast<int>(c.row.size()) != d_)
      throw std::invalid_argument("constraint row length differs from d");
    std::int64_t l = c.rhs.den;
    for (const auto& a : c.row) l = std::lcm(l, a.den);
    std::vector<std::int64_t> row(d_);
    for (int j = 0; j < d_; ++j) row[j] = c.row[j].num * (l / c.row[j].den);
    scaled_rows_.push_back(std::move(row));
    scaled_rhs_.push_back(c.rhs.num * (l / c.rhs.den));
  }
}

bool ExperimentSpace::contains(const Experiment& x) const {
  if (static_cast<int>(x.size()) != d_) return false;
  for (int v : x)
    if (v < 0 || v >= levels_) return false;
  if (fixed_first_ && x[0] != 1) return false;
  for (std::size_t i = 0; i < scaled_rows_.size(); ++i) {
    std::int64_t lhs = 0;
    for (int j = 0; j < d_; ++j) lhs += scaled_rows_[i][j] * x[j];
    if (lhs > scaled_rhs_[i]) return false;
  }
  return true;
}

std::uint64_t ExperimentSpace::box_size() const {
  std::uint64_t n = 1;
  for (int j = 0; j < d_; ++j) {
    if (n > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(levels_))
      return std::numeric_limits<std::uint64_t>::max();
    n *= static_cast<std::uint64_t>(levels_);
  }
  return n;
}

MonomialModel::MonomialModel(int d, std::vector<std::vector<int>> exponents)
    : d_(d), exponents_(std::move(exponents)), order_(0) {
  if (d_ < 1) throw std::invalid_argument("monomial model needs d >= 1");
  if (exponents_.empty()) throw std::invalid_argument("monomial model needs p >= 1");
  std::set<std::vector<int>> seen;
  for (const auto& e : exponents_) {
    if (static_cast<int>(e.size()) != d_)
      throw std::invalid_argument("exponent vector length differs from d");
    if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; }))
      throw std::invalid_argument("negative exponent");
    if (!seen.insert(e).second) throw std::invalid_argument("duplicate monomial");
    order_ = std::max(order_, std::accumulate(e.begin(), e.end(), 0));
  }
}

DesignPoint MonomialModel::evaluate(const Experiment& x) const {
  if (static_cast<int>(x.size()) != d_)
    throw std::invalid_argument("experiment length " + std::to_string(x.size()) +
                                " differs from factor count " + std::to_string(d_));
  DesignPoint v(size());
  for (int i = 0; i < size(); ++i) {
    double m = 1.0;
    for (int j = 0; j < d_; ++j)
      for (int e = 0; e < exponents_[i][j]; ++e) m *= x[j];
    v[i] = m;
  }
  return v;
}

Instance::Instance(ExperimentSpace s, MonomialModel m, int budget,
                   std::optional<std::uint64_t> seed_, std::string gen)
    : space(std::move(s)), model(std::move(m)), k(budget), seed(seed_), generator(std::move(gen)) {
  if (model.num_factors() != space.dim())
    throw std::invalid_argument("model and space disagree on the factor count");
  if (k < model.size())
    throw std::invalid_argument("budget k=" + std::to_string(k) + " is below p=" +
                                std::to_string(model.size()));
}

DesignPoint eval_design_point(const MonomialModel& model, const Experiment& x) {
  for (int v : x)
    if (v < 0) throw std::invalid_argument("experiment entries must be nonnegative");
  return model.evaluate(x);
}

MonomialModel build_full_first_order(int d) {
  if (d < 1) throw std::invalid_argument("full first-order model needs d >= 1");
  std::vector<std::vector<int>> ex;
  ex.emplace_back(d, 0);
  for (int j = 0; j < d; ++j) {
    std::vector<int> e(d, 0);
    e[j] = 1;
    ex.push_back(std::move(e));
  }
  return MonomialModel(d, std::move(ex));
}

MonomialModel build_second_order_pairs(int d) {
  if (d < 4) throw std::invalid_argument("second-order pair model needs d >= 4");
  auto ex = build_full_first_order(d).exponents();
  // 0-based indices 1 .. floor(d/2) are the factors x_2 .. x_{floor(d/2)+1}.
  const int last = d / 2;
  for (int l = 1; l <= last; ++l)
    for (int j = l + 1; j <= last; ++j) {
      std::vector<int> e(d, 0);
      e[l] = 1;
      e[j] = 1;
      ex.push_back(std::move(e));
    }
  return MonomialModel(d, std::move(ex));
}

MonomialModel fix_first_factor(const MonomialModel& model) {
  std::vector<std::vector<int>> out;
  std::set<std::vector<int>> seen;
  for (auto e : model.exponents()) {
    e[0] = 0;
    if (seen.insert(e).second) out.push_back(std::move(e));
  }
  return MonomialModel(model.num_factors(), std::move(out));
}

namespace {

int default_k(int p, std::optional<int> k) { return k ? *k : 2 * p; }

}  // namespace

Instance generate_cardinality_instance(int d, std::optional<int> k) {
  if (d < 3) throw std::invalid_argument("cardinality instance needs d >= 3");
  const int r = d / 3;
  LinearConstraint c{std::vector<Rational>(d, Rational(1)), Rational(r)};
  ExperimentSpace space(d, 2, {c}, true);
  MonomialModel model = fix_first_factor(build_full_first_order(d));
  const int p = model.size();
  return Instance(std::move(space), std::move(model), default_k(p, k), std::nullopt,
                  "cardinality");
}

std::vector<LinearConstraint> generate_knapsack_constraints(int d, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("knapsack constraints need d >= 2");
  Rng rng(seed);
  const int rest = d - 1;
  const int n_small = (8 * rest + 9) / 10;  // ceil(0.8 * (d - 1))
  std::vector<LinearConstraint> out;
  for (int i = 0; i < 2; ++i) {
    std::vector<int> positions(rest);
    std::iota(positions.begin(), positions.end(), 1);
    rng.shuffle(positions);
    std::vector<std::int64_t> a(d, 0);
    for (int t = 0; t < rest; ++t) {
      const bool small = t < n_small;
      a[positions[t]] = small ? rng.uniform_int(0, 5) : rng.uniform_int(20, 30);
    }
    LinearConstraint c;
    std::int64_t sum = 0;
    for (int j = 0; j < d; ++j) {
      c.row.emplace_back(a[j]);
      sum += a[j];
    }
    c.rhs = Rational(sum, 2);
    out.push_back(std::move(c));
  }
  return out;
}

Instance generate_knapsack_instance(int d, std::optional<int> k, std::uint64_t seed) {
  ExperimentSpace space(d, 2, generate_knapsack_constraints(d, seed), true);
  MonomialModel model = fix_first_factor(build_full_first_order(d));
  const int p = model.size();
  return Instance(std::move(space), std::move(model), default_k(p, k), seed, "knapsack");
}

Instance generate_second_order_knapsack_instance(int d, std::optional<int> k,
                                                 std::uint64_t seed) {
  if (d < 4) throw std::invalid_argument("second-order instance needs d >= 4");
  ExperimentSpace space(d, 2, generate_knapsack_constraints(d, seed), true);
  MonomialModel model = fix_first_factor(build_second_order_pairs(d));
  const int p = model.size();
  return Instance(std::move(space), std::move(model), default_k(p, k), seed, "second_order");
}

Instance generate_unconstrained_instance(int d, std::optional<int> k, int levels) {
  ExperimentSpace space(d, levels, {}, false);
  MonomialModel model = build_full_first_order(d);
  const int p = model.size();
  return Instance(std::move(space), std::move(model), default_k(p, k), std::nullopt,
                  "unconstrained");
}

std::vector<Experiment> enumerate_space(const ExperimentSpace& space, std::uint64_t cap) {
  if (space.box_size() > cap)
    throw SolverLimit("enumeration of " + std::to_string(space.levels()) + "^" +
                      std::to_string(space.dim()) + " points exceeds the cap");
  std::vector<Experiment> out;
  Experiment x(space.dim(), 0);
  while (true) {
    if (space.contains(x)) out.push_back(x);
    int j = space.dim() - 1;
    while (j >= 0 && x[j] == space.levels() - 1) x[j--] = 0;
    if (j < 0) break;
    ++x[j];
  }
  return out;
}

}  // namespace dopt

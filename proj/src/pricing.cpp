#include "dopt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dopt/errors.hpp"
#include "dopt/lp.hpp"

namespace dopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_tol(double v, double eps) { return eps * std::max(1.0, std::abs(v)); }

// Multilinear polynomial in binary variables: sorted support -> coefficient.
using Poly = std::map<std::vector<int>, double>;

std::vector<int> merge_support(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [sa, ca] : a)
    for (const auto& [sb, cb] : b) out[merge_support(sa, sb)] += ca * cb;
  return out;
}

}  // namespace

double pricing_objective(const Eigen::MatrixXd& g, const MonomialModel& model,
                         const Experiment& x) {
  const DesignPoint v = model.evaluate(x);
  return v.dot(g * v);
}

PricingResult heuristic_search(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                               const MonomialModel& model, const Experiment& start) {
  if (!space.contains(start))
    throw std::invalid_argument("heuristic_search needs a feasible start");
  PricingResult res;
  res.x = start;
  res.value = pricing_objective(g, model, start);
  const int d = space.dim();
  const int top = space.levels() - 1;

  auto try_move = [&](Experiment& y) {
    ++res.nodes;
    if (!space.contains(y)) return false;
    const double v = pricing_objective(g, model, y);
    if (v > res.value + rel_tol(res.value, 1e-12)) {
      res.x = y;
      res.value = v;
      return true;
    }
    return false;
  };

  auto improve_once = [&]() {
    for (int i = 0; i < d; ++i)
      for (int delta : {+1, -1}) {
        const int nv = res.x[i] + delta;
        if (nv < 0 || nv > top) continue;
        Experiment y = res.x;
        y[i] = nv;
        if (try_move(y)) return true;
      }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j || res.x[i] == top || res.x[j] == 0) continue;
        Experiment y = res.x;
        ++y[i];
        --y[j];
        if (try_move(y)) return true;
      }
    return false;
  };

  while (improve_once()) {
  }
  return res;
}

PricingResult solve_enum(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                         const MonomialModel& model, std::uint64_t cap) {
  if (space.box_size() > cap)
    throw SolverLimit("enumeration pricing: L^d exceeds the cap of " + std::to_string(cap));
  PricingResult res;
  Experiment x(space.dim(), 0);
  while (true) {
    ++res.nodes;
    if (space.contains(x)) {
      const double v = pricing_objective(g, model, x);
      if (res.x.empty() || v > res.value + rel_tol(res.value, 1e-12)) {
        res.x = x;
        res.value = v;
      }
    }
    int j = space.dim() - 1;
    while (j >= 0 && x[j] == space.levels() - 1) x[j--] = 0;
    if (j < 0) break;
    ++x[j];
  }
  if (res.x.empty()) throw DegenerateInstance("the experiment space is empty");
  res.exact = true;
  res.upper_bound = res.value;
  return res;
}

std::vector<int> LinearizedProgram::encode(const Experiment& x) const {
  std::vector<int> bits(num_bits, 0);
  for (int j = 0; j < num_factors; ++j)
    for (int b = 0; b < bits_per_factor; ++b) bits[bit(j, b)] = (x[j] >> b) & 1;
  return bits;
}

Experiment LinearizedProgram::decode(const std::vector<int>& bits) const {
  Experiment x(num_factors, 0);
  for (int j = 0; j < num_factors; ++j)
    for (int b = 0; b < bits_per_factor; ++b)
      if (bits[bit(j, b)]) x[j] += 1 << b;
  return x;
}

std::vector<double> LinearizedProgram::lift(const std::vector<int>& bits) const {
  std::vector<double> vars(num_vars(), 0.0);
  for (int i = 0; i < num_bits; ++i) vars[i] = bits[i];
  for (std::size_t a = 0; a < aux_support.size(); ++a) {
    int prod = 1;
    for (int b : aux_support[a]) prod &= bits[b];
    vars[num_bits + a] = prod;
  }
  return vars;
}

double LinearizedProgram::evaluate(const std::vector<int>& bits) const {
  const auto vars = lift(bits);
  double acc = objective_constant;
  for (int i = 0; i < num_vars(); ++i) acc += objective[i] * vars[i];
  return acc;
}

bool LinearizedProgram::satisfies(const std::vector<double>& vars, double tol) const {
  for (int i = 0; i < num_vars(); ++i)
    if (vars[i] < lower[i] - tol || vars[i] > upper[i] + tol) return false;
  for (const auto& row : rows) {
    double lhs = 0.0;
    for (const auto& [j, a] : row.coef) lhs += a * vars[j];
    if (lhs > row.rhs + tol) return false;
  }
  return true;
}

LinearizedProgram build_linearization(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                                      const MonomialModel& model) {
  if (model.order() > 2)
    throw std::invalid_argument("linearization supports models of order <= 2");
  if (model.num_factors() != space.dim())
    throw std::invalid_argument("model and space disagree on the factor count");
  const int p = model.size();
  if (g.rows() != p || g.cols() != p) throw std::invalid_argument("G must be p x p");

  LinearizedProgram prog;
  prog.num_factors = space.dim();
  prog.levels = space.levels();
  while ((1 << prog.bits_per_factor) < prog.levels) ++prog.bits_per_factor;
  prog.num_bits = prog.num_factors * prog.bits_per_factor;

  // x_j = sum_b 2^b z_{j,b}
  std::vector<Poly> factor_poly(prog.num_factors);
  for (int j = 0; j < prog.num_factors; ++j)
    for (int b = 0; b < prog.bits_per_factor; ++b)
      factor_poly[j][{prog.bit(j, b)}] = static_cast<double>(1 << b);

  std::vector<Poly> monomial_poly(p);
  for (int i = 0; i < p; ++i) {
    Poly m{{{}, 1.0}};
    for (int j = 0; j < prog.num_factors; ++j)
      for (int e = 0; e < model.exponents()[i][j]; ++e) m = multiply(m, factor_poly[j]);
    monomial_poly[i] = std::move(m);
  }

  Poly objective;
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      const double w = a == b ? g(a, a) : g(a, b) + g(b, a);
      if (w == 0.0) continue;
      for (const auto& [s, c] : multiply(monomial_poly[a], monomial_poly[b]))
        objective[s] += w * c;
    }

  prog.objective.assign(prog.num_bits, 0.0);
  for (const auto& [s, c] : objective) {
    if (s.empty()) {
      prog.objective_constant += c;
    } else if (s.size() == 1) {
      prog.objective[s[0]] += c;
    } else {
      prog.aux_support.push_back(s);
      prog.objective.push_back(c);
    }
  }

  for (const auto& c : space.constraints()) {
    LinearizedProgram::Row row;
    row.kind = LinearizedProgram::RowKind::side;
    row.rhs = c.rhs.to_double();
    for (int j = 0; j < prog.num_factors; ++j) {
      const double a = c.row[j].to_double();
      if (a == 0.0) continue;
      for (int b = 0; b < prog.bits_per_factor; ++b)
        row.coef.emplace_back(prog.bit(j, b), a * (1 << b));
    }
    prog.rows.push_back(std::move(row));
  }
  if ((1 << prog.bits_per_factor) != prog.levels) {
    for (int j = 0; j < prog.num_factors; ++j) {
      LinearizedProgram::Row row;
      row.kind = LinearizedProgram::RowKind::level_cap;
      row.rhs = prog.levels - 1;
      for (int b = 0; b < prog.bits_per_factor; ++b)
        row.coef.emplace_back(prog.bit(j, b), static_cast<double>(1 << b));
      prog.rows.push_back(std::move(row));
    }
  }
  for (std::size_t a = 0; a < prog.aux_support.size(); ++a) {
    const int y = prog.num_bits + static_cast<int>(a);
    const auto& s = prog.aux_support[a];
    for (int b : s) {
      LinearizedProgram::Row row;
      row.kind = LinearizedProgram::RowKind::envelope_upper;
      row.aux = static_cast<int>(a);
      row.coef = {{y, 1.0}, {b, -1.0}};
      prog.rows.push_back(std::move(row));
    }
    LinearizedProgram::Row row;
    row.kind = LinearizedProgram::RowKind::envelope_lower;
    row.aux = static_cast<int>(a);
    row.coef.emplace_back(y, -1.0);
    for (int b : s) row.coef.emplace_back(b, 1.0);
    row.rhs = static_cast<double>(s.size()) - 1.0;
    prog.rows.push_back(std::move(row));
  }

  prog.lower.assign(prog.num_vars(), 0.0);
  prog.upper.assign(prog.num_vars(), 1.0);
  if (space.fixed_first()) {
    for (int b = 0; b < prog.bits_per_factor; ++b) {
      const double v = (1 >> b) & 1;
      prog.lower[prog.bit(0, b)] = v;
      prog.upper[prog.bit(0, b)] = v;
    }
  }
  return prog;
}

namespace {

bool lex_less(const Experiment& a, const Experiment& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// LP used for bounding: side and level rows, plus only the envelope side
// that can bind given the sign of each auxiliary's objective coefficient
// (maximization pushes y up when its coefficient is positive, down when
// negative). Its optimum equals that of the full envelope LP.
DualSimplex bounding_lp(const LinearizedProgram& prog) {
  std::vector<const LinearizedProgram::Row*> keep;
  for (const auto& row : prog.rows) {
    using K = LinearizedProgram::RowKind;
    if (row.kind == K::side || row.kind == K::level_cap) {
      keep.push_back(&row);
      continue;
    }
    const double c = prog.objective[prog.num_bits + row.aux];
    if ((row.kind == K::envelope_upper && c > 0.0) || (row.kind == K::envelope_lower && c < 0.0))
      keep.push_back(&row);
  }
  const int n = prog.num_vars();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()), n);
  Eigen::VectorXd b(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (const auto& [j, v] : keep[i]->coef) a(static_cast<Eigen::Index>(i), j) += v;
    b[static_cast<Eigen::Index>(i)] = keep[i]->rhs;
  }
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(prog.objective.data(), n);
  Eigen::VectorXd lo = Eigen::Map<const Eigen::VectorXd>(prog.lower.data(), n);
  Eigen::VectorXd hi = Eigen::Map<const Eigen::VectorXd>(prog.upper.data(), n);
  return DualSimplex(a, b, c, lo, hi);
}

}  // namespace

double linearization_lp_bound(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                              const MonomialModel& model) {
  const LinearizedProgram prog = build_linearization(g, space, model);
  DualSimplex lp = bounding_lp(prog);
  const LpStatus st = lp.solve(1'000'000);
  if (st == LpStatus::infeasible) return -kInf;
  if (st != LpStatus::optimal) throw SolverLimit("root LP did not finish");
  return lp.bound() + prog.objective_constant;
}

PricingResult solve_bb(const Eigen::MatrixXd& g, const ExperimentSpace& space,
                       const MonomialModel& model, const std::optional<PricingResult>& incumbent,
                       std::optional<double> target, const BranchAndBoundOptions& options) {
  if (target && *target == kInf) target.reset();
  const bool has_target = target.has_value();
  const double tgt = target.value_or(-kInf);
  const LinearizedProgram prog = build_linearization(g, space, model);

  PricingResult best;
  if (incumbent && !incumbent->x.empty() && space.contains(incumbent->x)) {
    best.x = incumbent->x;
    best.value = pricing_objective(g, model, best.x);
  }
  if (has_target && !best.x.empty() && best.value > tgt) return best;

  auto threshold = [&]() { return std::max(best.value, tgt); };

  std::vector<DualSimplex> stack;
  stack.push_back(bounding_lp(prog));
  std::int64_t nodes = 0;
  bool limit_hit = false;

  while (!stack.empty()) {
    if (nodes >= options.node_limit) {
      limit_hit = true;
      break;
    }
    DualSimplex lp = std::move(stack.back());
    stack.pop_back();
    ++nodes;

    const double thr = threshold();
    const double cutoff =
        std::isfinite(thr) ? thr + rel_tol(thr, 1e-9) - prog.objective_constant : -kInf;
    const LpStatus status = lp.solve(options.lp_iteration_limit, cutoff);
    if (status == LpStatus::infeasible || status == LpStatus::cutoff) continue;

    const Eigen::VectorXd z = lp.solution();
    int branch = -1;
    double most = -1.0;
    for (int i = 0; i < prog.num_bits; ++i) {
      if (lp.lower(i) == lp.upper(i)) continue;
      const double frac = std::abs(z[i] - std::round(z[i]));
      if (frac > most + 1e-12) {
        most = frac;
        branch = i;
      }
    }

    const bool integral = branch < 0 || (status == LpStatus::optimal && most <= 1e-6);
    if (integral) {
      std::vector<int> bits(prog.num_bits);
      for (int i = 0; i < prog.num_bits; ++i) bits[i] = static_cast<int>(std::lround(z[i]));
      const Experiment x = prog.decode(bits);
      if (space.contains(x)) {
        const double v = pricing_objective(g, model, x);
        const double tie = rel_tol(best.value, 1e-9);
        if (best.x.empty() || v > best.value + tie ||
            (v >= best.value - tie && lex_less(x, best.x))) {
          best.x = x;
          best.value = v;
          if (has_target && v > tgt) {
            best.nodes = nodes;
            return best;
          }
        }
        continue;
      }
      if (branch < 0) continue;
    }

    DualSimplex up = lp;
    up.set_bounds(branch, 1.0, 1.0);
    lp.set_bounds(branch, 0.0, 0.0);
    if (z[branch] >= 0.5) {
      stack.push_back(std::move(lp));
      stack.push_back(std::move(up));
    } else {
      stack.push_back(std::move(up));
      stack.push_back(std::move(lp));
    }
  }

  best.nodes = nodes;
  if (limit_hit) {
    best.limit_hit = true;
    best.exact = false;
    return best;
  }
  if (!has_target || (!best.x.empty() && best.value >= tgt)) {
    if (best.x.empty()) throw DegenerateInstance("the experiment space is empty");
    best.exact = true;
    best.upper_bound = best.value;
  } else {
    best.upper_bound = tgt;
  }
  return best;
}

Pricer::Pricer(const ExperimentSpace& space, const MonomialModel& model, PricingOptions options)
    : space_(space), model_(model), options_(options) {
  if (model_.num_factors() != space_.dim())
    throw std::invalid_argument("model and space disagree on the factor count");
}

PricingResult Pricer::heuristic(const Eigen::MatrixXd& g, const Experiment& start) const {
  return heuristic_search(g, space_, model_, start);
}

PricingResult Pricer::exact(const Eigen::MatrixXd& g, const std::optional<PricingResult>& incumbent,
                            std::optional<double> target) const {
  if (options_.exact == ExactMethod::enumeration) return solve_enum(g, space_, model_, options_.enum_cap);
  return solve_bb(g, space_, model_, incumbent, target, options_.bb);
}

}  // namespace dopt

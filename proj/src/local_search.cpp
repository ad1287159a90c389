#include "dopt/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dopt/errors.hpp"

namespace dopt {

Eigen::MatrixXd information_matrix(const MonomialModel& model,
                                   const std::map<Experiment, int>& support) {
  const int p = model.size();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [x, m] : support) {
    const DesignPoint v = model.evaluate(x);
    s.noalias() += static_cast<double>(m) * v * v.transpose();
  }
  return s;
}

Design::Design(MonomialModel model, int k, std::map<Experiment, int> support)
    : model_(std::move(model)), k_(k), support_(std::move(support)) {
  int total = 0;
  for (const auto& [x, m] : support_) {
    if (m < 1) throw std::invalid_argument("design multiplicities must be positive");
    if (static_cast<int>(x.size()) != model_.num_factors())
      throw std::invalid_argument("design experiment has the wrong length");
    total += m;
  }
  if (total != k_)
    throw std::invalid_argument("design multiplicities sum to " + std::to_string(total) +
                                ", expected k = " + std::to_string(k_));
  info_ = InfoMatrix(information_matrix(model_, support_));
}

void Design::exchange(const Experiment& out, const Experiment& in) {
  auto it = support_.find(out);
  if (it == support_.end()) throw std::invalid_argument("exchange: x_out is not in the support");
  if (--it->second == 0) support_.erase(it);
  ++support_[in];
  const DesignPoint vo = model_.evaluate(out);
  const DesignPoint vi = model_.evaluate(in);
  Eigen::MatrixXd s = info_.matrix();
  s.noalias() -= vo * vo.transpose();
  s.noalias() += vi * vi.transpose();
  info_ = InfoMatrix(std::move(s));
}

std::vector<Experiment> Design::scan_order() const {
  std::vector<std::pair<int, Experiment>> items;
  for (const auto& [x, m] : support_) items.emplace_back(m, x);
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Experiment> out;
  for (auto& [m, x] : items) out.push_back(std::move(x));
  return out;
}

double Design::consistency_error() const {
  return (info_.matrix() - information_matrix(model_, support_)).cwiseAbs().maxCoeff();
}

std::optional<Experiment> sample_feasible(const ExperimentSpace& space, Rng& rng,
                                          std::uint64_t cap, std::uint64_t& used) {
  int bits = 0;
  while ((1 << bits) < space.levels()) ++bits;
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  Experiment x(space.dim());
  while (used < cap) {
    ++used;
    bool ok = true;
    for (int j = 0; j < space.dim(); ++j) {
      if (j == 0 && space.fixed_first()) {
        x[j] = 1;
        continue;
      }
      x[j] = static_cast<int>(rng.uniform_int(0, top));
      if (x[j] >= space.levels()) ok = false;
    }
    if (ok && space.contains(x)) return x;
  }
  return std::nullopt;
}

Design initial_design(const Instance& instance, std::uint64_t seed, std::uint64_t cap) {
  const int p = instance.p();
  Rng rng(seed);
  std::uint64_t used = 0;
  std::map<Experiment, int> support;
  std::vector<Eigen::VectorXd> basis;
  int count = 0;
  while (static_cast<int>(basis.size()) < p) {
    const auto x = sample_feasible(instance.space, rng, cap, used);
    if (!x)
      throw DegenerateInstance("initial design: reached rank " + std::to_string(basis.size()) +
                               " < p = " + std::to_string(p) + " after " + std::to_string(cap) +
                               " samples");
    const DesignPoint v = instance.model.evaluate(*x);
    Eigen::VectorXd r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) r -= q.dot(r) * q;
    if (r.norm() > 1e-9 * std::max(1.0, v.norm())) {
      basis.push_back(r.normalized());
      ++support[*x];
      ++count;
    }
  }
  while (count < instance.k) {
    const auto x = sample_feasible(instance.space, rng, cap, used);
    if (!x) throw DegenerateInstance("initial design: sample cap exhausted while filling to k");
    ++support[*x];
    ++count;
  }
  return Design(instance.model, instance.k, std::move(support));
}

const char* to_string(MoveKind kind) { return kind == MoveKind::heuristic ? "heuristic" : "ip"; }

namespace {

double gain_tolerance(double logdet, double tol) { return tol * std::max(1.0, std::abs(logdet)); }

// logdet of S - vo vo^T + vi vi^T, computed from the exact integer matrix.
double exchanged_logdet(const Design& design, const DesignPoint& vo, const DesignPoint& vi) {
  Eigen::MatrixXd s = design.info().matrix();
  s.noalias() -= vo * vo.transpose();
  s.noalias() += vi * vi.transpose();
  return InfoMatrix(std::move(s)).logdet();
}

}  // namespace

StepOutcome exchange_step(const Design& design, const Pricer& pricer,
                          const LocalSearchOptions& options) {
  if (!design.info().full_rank())
    throw std::invalid_argument("exchange_step needs a rank-p design");
  const MonomialModel& model = design.model();
  const int p = model.size();
  const double ld = design.logdet();
  const double tol = gain_tolerance(ld, options.tol_improve);
  StepOutcome outcome;

  for (const Experiment& xo : design.scan_order()) {
    const DesignPoint vo = model.evaluate(xo);
    const InfoMatrix sx = rank_one_downdate(design.info(), vo);
    if (sx.rank() < p - 1)
      throw NumericalError("downdate dropped the rank below p - 1");
    const Eigen::MatrixXd g = pricing_matrix(sx);

    // A candidate x improves iff p(x)^T G p(x) > target.
    double target;
    if (sx.full_rank())
      target = std::expm1(ld + tol - sx.logdet());
    else
      target = std::exp(ld + tol - log_kdet(sx, p - 1));

    auto accept = [&](const Experiment& xi, MoveKind kind) -> bool {
      if (xi == xo) return false;
      const double nl = exchanged_logdet(design, vo, model.evaluate(xi));
      if (!(nl > ld + tol)) return false;
      outcome.move = Exchange{xo, xi, nl, kind};
      return true;
    };

    PricingResult h;
    if (pricer.options().use_heuristic) {
      h = pricer.heuristic(g, xo);
      if (h.value > target && accept(h.x, MoveKind::heuristic)) return outcome;
    }

    ++outcome.ip_calls;
    std::optional<PricingResult> incumbent;
    if (!h.x.empty()) incumbent = h;
    const PricingResult r = pricer.exact(g, incumbent, target);
    if (!r.x.empty() && r.value > target && accept(r.x, MoveKind::ip)) return outcome;
    if (r.limit_hit) outcome.inconclusive = true;
  }
  return outcome;
}

namespace {

std::pair<Design, LocalSearchReport> search_from(Design design, const Pricer& pricer,
                                                 const LocalSearchOptions& options) {
  LocalSearchReport report;
  report.initial_logdet = design.logdet();
  while (true) {
    if (report.iterations >= options.max_moves) {
      report.move_limit_hit = true;
      break;
    }
    const StepOutcome step = exchange_step(design, pricer, options);
    ++report.scans;
    report.ip_calls += step.ip_calls;
    if (!step.move) {
      report.inconclusive = step.inconclusive;
      report.proved_local_optimum = !step.inconclusive;
      break;
    }
    const double before = design.logdet();
    design.exchange(step.move->out, step.move->in);
    if (!(design.logdet() > before))
      throw NumericalError("accepted exchange did not increase log det");
    ++report.iterations;
    if (step.move->kind == MoveKind::heuristic) ++report.heuristic_moves;
    report.trace.push_back({report.iterations, design.logdet(), step.move->kind});
  }
  report.final_logdet = design.logdet();
  return {std::move(design), std::move(report)};
}

}  // namespace

std::pair<Design, LocalSearchReport> run_local_search(const Instance& instance,
                                                      std::uint64_t seed,
                                                      const LocalSearchOptions& options) {
  Pricer pricer(instance.space, instance.model, options.pricing);
  return search_from(initial_design(instance, seed, options.sample_cap), pricer, options);
}

std::pair<Design, LocalSearchReport> run_local_search(const Instance& instance,
                                                      Design warm_start,
                                                      const LocalSearchOptions& options) {
  if (!(warm_start.model() == instance.model))
    throw std::invalid_argument("warm start uses a different model");
  if (warm_start.k() != instance.k)
    throw std::invalid_argument("warm start has k = " + std::to_string(warm_start.k()) +
                                ", instance has k = " + std::to_string(instance.k));
  for (const auto& [x, m] : warm_start.support())
    if (!instance.space.contains(x))
      throw std::invalid_argument("warm start contains an infeasible experiment");
  if (!warm_start.info().full_rank())
    throw DegenerateInstance("warm start design is rank deficient");
  Pricer pricer(instance.space, instance.model, options.pricing);
  return search_from(std::move(warm_start), pricer, options);
}

double guarantee_factor(int k, int p, double rho) {
  if (p < 1 || k < p) throw std::invalid_argument("guarantee_factor needs k >= p >= 1");
  if (!(rho >= 1.0)) throw std::invalid_argument("guarantee_factor needs rho >= 1");
  const double base = (static_cast<double>(k - p + 1) / k) * (p / (p + k * (rho - 1.0)));
  return std::pow(base, p);
}

}  // namespace dopt

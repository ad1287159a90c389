#include "dopt/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dopt/errors.hpp"
#include "dopt/local_search.hpp"
#include "dopt/rng.hpp"

namespace dopt {

Eigen::MatrixXd moment_matrix(const std::vector<DesignPoint>& points,
                              const Eigen::VectorXd& weights) {
  if (points.empty()) throw std::invalid_argument("moment matrix of an empty point set");
  if (static_cast<std::size_t>(weights.size()) != points.size())
    throw std::invalid_argument("weights and points differ in length");
  const auto p = points.front().size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t i = 0; i < points.size(); ++i)
    if (weights[static_cast<Eigen::Index>(i)] != 0.0)
      m.selfadjointView<Eigen::Lower>().rankUpdate(points[i],
                                                   weights[static_cast<Eigen::Index>(i)]);
  return m.selfadjointView<Eigen::Lower>();
}

namespace {

// Columns are the points; u is normalized to sum 1 so the optimum has
// max_v v^T M(u)^{-1} v = p.
struct Moment {
  Eigen::MatrixXd m;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  bool full_rank = false;
  double logdet = 0.0;

  Moment(const Eigen::MatrixXd& v, const Eigen::VectorXd& u) {
    m = v * u.asDiagonal() * v.transpose();
    ldlt.compute(m);
    const Eigen::VectorXd diag = ldlt.vectorD();
    full_rank = diag.size() > 0 && diag.minCoeff() > kRankTolerance * diag.maxCoeff() &&
                diag.maxCoeff() > 0.0;
    logdet = full_rank ? diag.array().log().sum() : -std::numeric_limits<double>::infinity();
  }
  Eigen::VectorXd leverage(const Eigen::MatrixXd& v) const {
    return (v.array() * ldlt.solve(v).array()).colwise().sum().transpose();
  }
};

Eigen::MatrixXd columns_of(const std::vector<DesignPoint>& points, const std::vector<int>& idx) {
  Eigen::MatrixXd v(points.front().size(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = points[idx[c]];
  return v;
}

// Path-following Newton method for
//   max ln det M(u) + mu sum ln u_i  s.t.  sum u = 1,
// driving mu down until max leverage <= (1 + tol) p. Returns false when the
// iteration budget runs out.
bool barrier_newton(const Eigen::MatrixXd& v, Eigen::VectorXd& u, double tol,
                    std::int64_t& budget, std::int64_t& used) {
  const auto n = v.cols();
  const double pd = static_cast<double>(v.rows());
  const double nd = static_cast<double>(n);
  u = 0.99 * u + Eigen::VectorXd::Constant(n, 0.01 / nd);
  u /= u.sum();
  double mu = 0.1 * pd / nd;
  double mu_min = 0.1 * tol * pd / nd;

  auto barrier = [&](const Eigen::VectorXd& w, const Moment& mm) {
    return mm.logdet + mu * w.array().log().sum();
  };

  while (true) {
    Moment mm(v, u);
    if (!mm.full_rank) throw DegenerateInstance("restricted master: points do not span R^p");
    const Eigen::MatrixXd w = mm.ldlt.solve(v);
    const Eigen::VectorXd d = (v.array() * w.array()).colwise().sum().transpose();
    if (d.maxCoeff() <= (1.0 + tol) * pd) return true;
    if (budget-- <= 0) return false;
    ++used;

    const Eigen::MatrixXd q = v.transpose() * w;
    Eigen::MatrixXd a = q.cwiseProduct(q);
    a.diagonal() += mu * u.cwiseInverse().cwiseAbs2();
    const Eigen::VectorXd g = d + mu * u.cwiseInverse();
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("restricted master: Newton system");
    const Eigen::VectorXd y1 = llt.solve(g);
    const Eigen::VectorXd y2 = llt.solve(Eigen::VectorXd::Ones(n));
    const Eigen::VectorXd step = y1 - (y1.sum() / y2.sum()) * y2;
    const double decrement = g.dot(step);

    double t = 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (step[i] < 0.0) t = std::min(t, -0.95 * u[i] / step[i]);
    const double f0 = barrier(u, mm);
    Eigen::VectorXd trial;
    for (int ls = 0; ls < 60; ++ls) {
      trial = u + t * step;
      trial /= trial.sum();
      const Moment mt(v, trial);
      // Below ~1e-10 the barrier change drowns in rounding; near the center
      // the full Newton step is safe.
      if (mt.full_rank && (trial.array() > 0.0).all() &&
          (decrement < 1e-10 || barrier(trial, mt) >= f0 + 0.25 * t * decrement))
        break;
      t *= 0.5;
    }
    u = trial;
    if (decrement < 0.25) {
      if (mu > mu_min)
        mu = std::max(mu_min, mu / 8.0);
      else if (decrement < 1e-12)
        mu_min = mu = mu / 8.0;  // centered but still short of the test
    }
  }
}

}  // namespace

ContinuousDesign solve_restricted_master(const std::vector<DesignPoint>& points, double k,
                                         const MasterOptions& options,
                                         const std::optional<Eigen::VectorXd>& initial,
                                         MasterStats* stats) {
  if (points.empty()) throw DegenerateInstance("restricted master: no points");
  if (!(k > 0.0)) throw std::invalid_argument("restricted master: k must be positive");
  const int n = static_cast<int>(points.size());
  const int p = static_cast<int>(points.front().size());
  const double pd = static_cast<double>(p);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const Eigen::MatrixXd v = columns_of(points, all);

  Eigen::VectorXd u;
  if (initial) {
    if (initial->size() != n || (initial->array() < 0.0).any() || !(initial->sum() > 0.0))
      throw std::invalid_argument("restricted master: bad initial weights");
    u = *initial / initial->sum();
  } else {
    u = Eigen::VectorXd::Constant(n, 1.0 / n);
  }
  if (!Moment(v, u).full_rank) throw DegenerateInstance("restricted master: points do not span R^p");

  std::int64_t used = 0;
  std::int64_t budget = options.max_iterations;
  bool converged = false;

  if (options.method == MasterMethod::multiplicative) {
    while (true) {
      const Moment mm(v, u);
      const Eigen::VectorXd d = mm.leverage(v);
      if (d.maxCoeff() <= (1.0 + options.tol) * pd) {
        converged = true;
        break;
      }
      if (used >= budget) break;
      ++used;
      u = u.cwiseProduct(d) / pd;
      u /= u.sum();
    }
  } else {
    // A short multiplicative phase finds the rough support when starting cold
    // on many points; Newton then runs on the points that matter.
    constexpr int kActiveCap = 120;
    if (!initial && n > kActiveCap) {
      for (int it = 0; it < 30; ++it, ++used) {
        const Eigen::VectorXd d = Moment(v, u).leverage(v);
        u = u.cwiseProduct(d) / pd;
        u /= u.sum();
      }
    }
    std::vector<char> active(n, 0);
    if (n <= kActiveCap) {
      std::fill(active.begin(), active.end(), 1);
    } else {
      std::vector<int> order(all);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return u[a] > u[b]; });
      for (int c = 0; c < kActiveCap; ++c)
        if (u[order[c]] > 0.0) active[order[c]] = 1;
    }
    budget -= used;
    while (true) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (active[i]) idx.push_back(i);
      const Eigen::MatrixXd va = columns_of(points, idx);
      Eigen::VectorXd ua(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) ua[static_cast<Eigen::Index>(c)] = u[idx[c]];
      if (!(ua.sum() > 0.0)) ua.setOnes();
      ua /= ua.sum();
      if (!Moment(va, ua).full_rank) {
        // the chosen subset lost rank; fall back to every point
        std::fill(active.begin(), active.end(), 1);
        continue;
      }
      // Inner solve slightly tighter so the full check has room.
      if (!barrier_newton(va, ua, 0.5 * options.tol, budget, used)) break;
      u.setZero();
      for (std::size_t c = 0; c < idx.size(); ++c) u[idx[c]] = ua[static_cast<Eigen::Index>(c)];
      const Eigen::VectorXd d = Moment(v, u).leverage(v);
      if (d.maxCoeff() <= (1.0 + options.tol) * pd) {
        converged = true;
        break;
      }
      std::vector<int> viol;
      for (int i = 0; i < n; ++i)
        if (!active[i] && d[i] > (1.0 + options.tol) * pd) viol.push_back(i);
      if (viol.empty()) {
        std::fill(active.begin(), active.end(), 1);
        continue;
      }
      std::stable_sort(viol.begin(), viol.end(), [&](int a, int b) { return d[a] > d[b]; });
      const std::size_t add = std::min<std::size_t>(viol.size(), std::max(2 * p, 20));
      for (std::size_t c = 0; c < add; ++c) active[viol[c]] = 1;
    }
  }

  if (stats) {
    stats->iterations = used;
    stats->converged = converged;
  }
  if (!converged)
    throw SolverLimit("restricted master: no convergence within " +
                      std::to_string(options.max_iterations) + " iterations");

  ContinuousDesign cd;
  cd.points = points;
  cd.weights = k * u;
  cd.k = k;
  cd.moment = InfoMatrix(moment_matrix(points, cd.weights));
  return cd;
}

const char* to_string(CertificateScope scope) {
  return scope == CertificateScope::full ? "full" : "restricted";
}

double dual_objective(const Eigen::MatrixXd& lambda, double nu, double k) {
  const InfoMatrix l(lambda);
  if (!l.full_rank()) throw DegenerateInstance("dual certificate: Lambda is singular");
  return k * nu - l.logdet() - static_cast<double>(lambda.rows());
}

DualCertificate dual_from_primal(const ContinuousDesign& cd) {
  if (!cd.moment.full_rank()) throw DegenerateInstance("dual_from_primal: singular moment");
  DualCertificate cert;
  cert.lambda = cd.moment.inverse();
  cert.k = cd.k;
  cert.nu = 0.0;
  for (const auto& v : cd.points) cert.nu = std::max(cert.nu, v.dot(cert.lambda * v));
  // ln det Lambda = -ln det M; avoids refactorizing the inverse.
  cert.objective = cd.k * cert.nu + cd.moment.logdet() - static_cast<double>(cd.moment.dim());
  cert.scope = CertificateScope::restricted;
  return cert;
}

AlphaResult check_dual_feasibility(const DualCertificate& cert, const Pricer& pricer,
                                   const std::optional<PricingResult>& incumbent) {
  const PricingResult r = pricer.exact(cert.lambda, incumbent);
  return {r.x, r.value, r.exact};
}

double upper_bound_from_alpha(const DualCertificate& cert, double alpha, double k, int p,
                              bool alpha_exact) {
  if (!alpha_exact)
    throw std::invalid_argument("upper bound needs alpha from an exact pricing solve");
  if (cert.lambda.rows() != p) throw std::invalid_argument("certificate dimension differs from p");
  return dual_objective(cert.lambda, alpha, k);
}

DualCertificate certify(const DualCertificate& cert, double alpha) {
  DualCertificate out = cert;
  out.nu = alpha;
  out.objective = dual_objective(cert.lambda, alpha, cert.k);
  out.scope = CertificateScope::full;
  return out;
}

int sparsity_bound(int p) { return p * (p - 1) / 2 + p + 1; }

ContinuousDesign sparsify(const ContinuousDesign& cd, SparsifyMode mode) {
  const int n = static_cast<int>(cd.points.size());
  if (n == 0) return cd;
  const int p = static_cast<int>(cd.points.front().size());
  const int rows = sparsity_bound(p);
  auto column = [&](int i) {
    Eigen::VectorXd c(rows);
    const auto& v = cd.points[i];
    int r = 0;
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) c[r++] = v[a] * v[b];
    c[r] = 1.0;
    return c;
  };

  Eigen::VectorXd w = cd.weights;
  std::vector<int> idx;
  for (int i = 0; i < n; ++i)
    if (w[i] > 0.0) idx.push_back(i);
  const double wscale = std::max(cd.k, w.sum());

  while (!(mode == SparsifyMode::to_bound && static_cast<int>(idx.size()) <= rows)) {
    const int width = std::min<int>(static_cast<int>(idx.size()), rows + 1);
    Eigen::MatrixXd a(rows, width);
    for (int c = 0; c < width; ++c) a.col(c) = column(idx[c]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd ker = lu.kernel();
    if (lu.rank() == width || ker.cols() == 0 || ker.col(0).isZero()) {
      if (static_cast<int>(idx.size()) > rows)
        throw NumericalError("sparsify: no kernel vector although the support exceeds the bound");
      break;  // support columns independent: basic solution
    }
    Eigen::VectorXd eta = ker.col(0);
    eta /= eta.cwiseAbs().maxCoeff();
    if (eta.maxCoeff() <= 0.0) eta = -eta;
    int hit = -1;
    double t = std::numeric_limits<double>::infinity();
    for (int c = 0; c < width; ++c)
      if (eta[c] > 1e-12 && w[idx[c]] / eta[c] < t) {
        t = w[idx[c]] / eta[c];
        hit = c;
      }
    if (hit < 0) throw NumericalError("sparsify: kernel vector has no positive entry");
    for (int c = 0; c < width; ++c) w[idx[c]] -= t * eta[c];
    w[idx[hit]] = 0.0;
    std::vector<int> keep;
    for (int i : idx) {
      if (w[i] <= 1e-14 * wscale) w[i] = 0.0;
      if (w[i] > 0.0) keep.push_back(i);
    }
    idx = std::move(keep);
  }

  ContinuousDesign out;
  out.k = cd.k;
  out.weights.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    out.points.push_back(cd.points[idx[c]]);
    if (!cd.experiments.empty()) out.experiments.push_back(cd.experiments[idx[c]]);
    out.weights[static_cast<Eigen::Index>(c)] = w[idx[c]];
  }
  // keep the weight sum exact
  out.weights *= cd.weights.sum() / out.weights.sum();
  out.moment = InfoMatrix(moment_matrix(out.points, out.weights));
  return out;
}

const char* to_string(CgMode mode) { return mode == CgMode::primal ? "primal" : "dual"; }

const char* to_string(CgStatus status) {
  switch (status) {
    case CgStatus::converged:
      return "converged";
    case CgStatus::iteration_limit:
      return "iteration_limit";
    case CgStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

// Stored point set P' with its experiments, deduplicated.
struct Pool {
  const MonomialModel* model;
  std::vector<Experiment> exps;
  std::vector<DesignPoint> pts;
  std::set<Experiment> seen;

  bool add(const Experiment& x) {
    if (!seen.insert(x).second) return false;
    exps.push_back(x);
    pts.push_back(model->evaluate(x));
    return true;
  }
};

}  // namespace

ColumnGenerationResult column_generation(const Instance& instance, const Pricer& pricer,
                                         const ColumnGenerationParams& params) {
  const int p = instance.p();
  const double k = instance.k;
  Rng rng(params.seed);
  std::uint64_t used = 0;

  Pool pool{&instance.model, {}, {}, {}};
  {
    std::vector<Eigen::VectorXd> basis;
    std::uint64_t extra = 0;
    while (static_cast<int>(basis.size()) < p ||
           (static_cast<int>(pool.exps.size()) < 2 * p && extra < 100u * p)) {
      const auto x = sample_feasible(instance.space, rng, params.sample_cap, used);
      if (!x)
        throw DegenerateInstance("column generation: random points reach rank " +
                                 std::to_string(basis.size()) + " < p = " + std::to_string(p));
      if (static_cast<int>(basis.size()) == p) ++extra;
      if (!pool.add(*x)) continue;
      Eigen::VectorXd r = pool.pts.back();
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) r -= q.dot(r) * q;
      if (r.norm() > 1e-9 * std::max(1.0, pool.pts.back().norm()))
        basis.push_back(r.normalized());
    }
  }

  ColumnGenerationResult res;
  MasterStats ms;
  auto solve_master = [&](const std::optional<Eigen::VectorXd>& init) {
    ContinuousDesign cd = solve_restricted_master(pool.pts, k, params.master, init, &ms);
    cd.experiments = pool.exps;
    res.master_iterations += ms.iterations;
    return cd;
  };

  ContinuousDesign cd = solve_master(std::nullopt);
  DualCertificate cert = dual_from_primal(cd);
  CgMode mode = params.start_in_dual_mode ? CgMode::dual : CgMode::primal;
  {
    CgTraceEntry e;
    e.master_obj = cd.objective();
    e.nu = cert.nu;
    e.mode = mode;
    e.n_points = static_cast<int>(pool.pts.size());
    res.trace.push_back(e);
  }
  const auto sparsify_above = static_cast<std::size_t>((p * p + 2) / 3);  // ceil(p^2/3)

  for (std::int64_t iter = 1; iter <= params.max_iterations; ++iter) {
    CgTraceEntry e;
    e.iter = iter;
    e.nu = cert.nu;
    e.mode = mode;

    // Start the heuristic from the stored point with the largest v^T Lambda v.
    int start = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pool.pts.size(); ++i) {
      const double val = pool.pts[i].dot(cert.lambda * pool.pts[i]);
      if (val > best) {
        best = val;
        start = static_cast<int>(i);
      }
    }
    PricingResult h;
    if (pricer.options().use_heuristic) h = pricer.heuristic(cert.lambda, pool.exps[start]);
    Experiment x = h.x;
    double value = h.value;
    e.heuristic_value = h.value;

    if (!(value >= (1.0 + params.delta) * cert.nu)) {
      ++res.ip_calls;
      e.ip_solved = true;
      std::optional<PricingResult> inc;
      if (!h.x.empty()) inc = h;
      const PricingResult r = pricer.exact(cert.lambda, inc);
      if (x.empty() || r.value > value) {
        x = r.x;
        value = r.value;
      }
      if (r.exact) {
        e.alpha = r.value;
        e.upper_bound = upper_bound_from_alpha(cert, r.value, k, p);
        if (!res.best_upper_bound || *e.upper_bound < *res.best_upper_bound)
          res.best_upper_bound = e.upper_bound;
      }
      if (value <= (1.0 + params.epsilon) * cert.nu) {
        e.master_obj = cd.objective();
        e.n_points = static_cast<int>(pool.pts.size());
        res.trace.push_back(e);
        if (r.exact) {
          res.status = CgStatus::converged;
          res.certificate = certify(cert, r.value);
        } else {
          res.status = CgStatus::inconclusive;
          res.certificate = cert;
        }
        res.design = std::move(cd);
        return res;
      }
    }

    // New columns: the violating point plus random feasible points.
    std::vector<Experiment> fresh;
    std::set<Experiment> fresh_seen;
    auto offer = [&](const Experiment& y) {
      if (pool.seen.count(y) || !fresh_seen.insert(y).second) return;
      fresh.push_back(y);
    };
    offer(x);
    const int wanted = mode == CgMode::primal ? p - 1 : 2 * (p - 1) * (p - 1);
    std::uint64_t draws = 0;
    const std::uint64_t draw_cap = 20u * static_cast<std::uint64_t>(wanted) + 20u;
    while (static_cast<int>(fresh.size()) < wanted + 1 && draws < draw_cap) {
      std::uint64_t one = 0;
      const auto y = sample_feasible(instance.space, rng, params.sample_cap, one);
      draws += 1;
      if (!y) break;
      offer(*y);
    }

    Eigen::VectorXd warm = cd.weights;
    e.candidates = static_cast<int>(pool.pts.size() + fresh.size());
    if (mode == CgMode::primal && pool.pts.size() + fresh.size() > sparsify_above) {
      const ContinuousDesign sp = sparsify(cd, SparsifyMode::to_basic);
      pool = Pool{&instance.model, {}, {}, {}};
      for (const auto& y : sp.experiments) pool.add(y);
      warm = sp.weights;
      e.sparsified = true;
    }
    const Eigen::Index old_n = warm.size();
    for (const auto& y : fresh) pool.add(y);
    Eigen::VectorXd init(static_cast<Eigen::Index>(pool.pts.size()));
    init.head(old_n) = 0.95 * warm;
    if (init.size() > old_n)
      init.tail(init.size() - old_n).setConstant(0.05 * k / static_cast<double>(init.size() - old_n));
    else
      init.head(old_n) = warm;

    const double prev = cd.objective();
    cd = solve_master(init);
    cert = dual_from_primal(cd);
    e.master_obj = cd.objective();
    e.n_points = static_cast<int>(pool.pts.size());
    res.trace.push_back(e);
    if (mode == CgMode::primal &&
        cd.objective() - prev < params.gamma * std::max(1.0, std::abs(prev)))
      mode = CgMode::dual;
  }

  res.status = CgStatus::iteration_limit;
  res.certificate = cert;
  res.design = std::move(cd);
  return res;
}

}  // namespace dopt

#include <functional>
#include <random>

#include "doctest.h"
#include "dopt/lp.hpp"

using namespace dopt;

namespace {

// Best vertex by trying every choice of n active constraints among the rows
// and the bounds. Fine for n <= 3.
double vertex_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, bool& feasible) {
  const int n = static_cast<int>(c.size()), m = static_cast<int>(b.size());
  Eigen::MatrixXd all(m + 2 * n, n);
  Eigen::VectorXd rhs(m + 2 * n);
  all.topRows(m) = a;
  rhs.head(m) = b;
  for (int j = 0; j < n; ++j) {
    all.row(m + 2 * j) = Eigen::RowVectorXd::Unit(n, j);
    rhs[m + 2 * j] = hi[j];
    all.row(m + 2 * j + 1) = -Eigen::RowVectorXd::Unit(n, j);
    rhs[m + 2 * j + 1] = -lo[j];
  }
  const int total = m + 2 * n;
  double best = -std::numeric_limits<double>::infinity();
  feasible = false;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd sub(n, n);
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) {
        sub.row(i) = all.row(pick[i]);
        r[i] = rhs[pick[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
      if (lu.rank() < n) return;
      const Eigen::VectorXd z = lu.solve(r);
      if (((all * z - rhs).array() > 1e-9).any()) return;
      feasible = true;
      best = std::max(best, c.dot(z));
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("two-variable LP") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 1;
  const Eigen::Vector2d b(4, 6), c(1, 1), lo(0, 0), hi(10, 10);
  DualSimplex lp(a, b, c, lo, hi);
  REQUIRE(lp.solve(100) == LpStatus::optimal);
  CHECK(lp.bound() == doctest::Approx(2.8));
  CHECK(lp.solution()[0] == doctest::Approx(1.6));
  CHECK(lp.solution()[1] == doctest::Approx(1.2));
}

TEST_CASE("infeasible bounds against a row") {
  Eigen::MatrixXd a(1, 1);
  a << 1;
  DualSimplex lp(a, Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Ones(1),
                 Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  CHECK(lp.solve(100) == LpStatus::infeasible);
}

TEST_CASE("random LPs agree with vertex enumeration, also after bound changes") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible_cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 3, m = 1 + trial % 4;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m), c(n), lo(n), hi(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(gen);
      b[i] = u(gen) + 0.3;
    }
    for (int j = 0; j < n; ++j) {
      c[j] = u(gen);
      lo[j] = 0.0;
      hi[j] = 1.0;
    }
    DualSimplex lp(a, b, c, lo, hi);
    bool feasible = false;
    double want = vertex_oracle(a, b, c, lo, hi, feasible);
    LpStatus st = lp.solve(1000);
    if (feasible) {
      ++feasible_cases;
      REQUIRE(st == LpStatus::optimal);
      CHECK(lp.bound() == doctest::Approx(want).epsilon(1e-9));
      const Eigen::VectorXd z = lp.solution();
      CHECK(((a * z - b).array() <= 1e-9).all());
    } else {
      CHECK(st == LpStatus::infeasible);
    }

    // fix a variable and re-solve from the warm basis
    const int j = trial % n;
    const double v = (trial / 3) % 2 ? 1.0 : 0.0;
    lp.set_bounds(j, v, v);
    lo[j] = hi[j] = v;
    want = vertex_oracle(a, b, c, lo, hi, feasible);
    st = lp.solve(1000);
    if (feasible) {
      REQUIRE(st == LpStatus::optimal);
      CHECK(lp.bound() == doctest::Approx(want).epsilon(1e-9));
      CHECK(lp.solution()[j] == doctest::Approx(v));
    } else {
      CHECK(st == LpStatus::infeasible);
    }
  }
  CHECK(feasible_cases > 100);
}

TEST_CASE("cutoff stops early with a valid bound") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 1;
  DualSimplex lp(a, Eigen::Vector2d(4, 6), Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0),
                 Eigen::Vector2d(10, 10));
  const LpStatus st = lp.solve(100, 5.0);
  CHECK(st == LpStatus::cutoff);
  CHECK(lp.bound() <= 5.0);
  CHECK(lp.bound() >= 2.8 - 1e-9);
}

#include <random>

#include "doctest.h"
#include "dopt/errors.hpp"
#include "dopt/linalg.hpp"
#include "oracles.hpp"

using namespace dopt;

TEST_CASE("logdet and rank against eigenvalues") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + trial % 9;
    const Eigen::MatrixXd s = oracle::random_psd(p, gen) + 0.1 * Eigen::MatrixXd::Identity(p, p);
    const InfoMatrix m(s);
    CHECK(m.rank() == p);
    CHECK(m.logdet() == doctest::Approx(oracle::logdet(s)).epsilon(1e-10));
  }
  const Eigen::MatrixXd def = oracle::random_psd(5, gen, 3);
  const InfoMatrix d(def);
  CHECK(d.rank() == 3);
  CHECK(d.logdet() == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(d.inverse(), std::domain_error);
}

TEST_CASE("asymmetric input is rejected") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 1) = 0.5;
  CHECK_THROWS_AS(InfoMatrix{a}, std::invalid_argument);
}

TEST_CASE("determinant updates") {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 8;
    const Eigen::MatrixXd s = oracle::random_psd(p, gen) + Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd v(p);
    for (int i = 0; i < p; ++i) v[i] = nd(gen);
    const double ratio = oracle::det(s + v * v.transpose()) / oracle::det(s);
    CHECK(det_update_full_rank(InfoMatrix(s), v) == doctest::Approx(ratio).epsilon(1e-10));

    const Eigen::MatrixXd r = oracle::random_psd(p, gen, p - 1);
    const InfoMatrix ri(r);
    REQUIRE(ri.rank() == p - 1);
    const double direct = oracle::det(r + v * v.transpose());
    CHECK(kdet(ri, p - 1) * det_update_rank_deficient(ri, v) ==
          doctest::Approx(direct).epsilon(1e-8));
    CHECK_THROWS_AS(det_update_full_rank(ri, v), std::domain_error);
  }
  CHECK_THROWS_AS(det_update_rank_deficient(InfoMatrix(Eigen::MatrixXd::Identity(3, 3)),
                                            Eigen::VectorXd::Ones(3)),
                  std::domain_error);
}

TEST_CASE("kdet is the product of the largest eigenvalues") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  s.diagonal() << 2.0, 5.0, 0.0;
  CHECK(kdet(InfoMatrix(s), 2) == doctest::Approx(10.0));
  CHECK(log_kdet(InfoMatrix(s), 2) == doctest::Approx(std::log(10.0)));
  CHECK(kdet(InfoMatrix(s), 3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(kdet(InfoMatrix(s), 4), std::invalid_argument);
}

TEST_CASE("pricing matrix") {
  std::mt19937_64 gen(13);
  const Eigen::MatrixXd s = oracle::random_psd(4, gen) + Eigen::MatrixXd::Identity(4, 4);
  CHECK((pricing_matrix(InfoMatrix(s)) * s - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);

  const Eigen::MatrixXd r = oracle::random_psd(4, gen, 3);
  const Eigen::MatrixXd g = pricing_matrix(InfoMatrix(r));
  CHECK((g * g - g).norm() < 1e-10);
  CHECK((r * g).norm() < 1e-8 * r.norm());
  CHECK(g.trace() == doctest::Approx(1.0));
  CHECK_THROWS_AS(pricing_matrix(InfoMatrix(oracle::random_psd(4, gen, 2))), std::domain_error);
}

TEST_CASE("rank-one downdate clamps noise and rejects indefinite results") {
  const Eigen::Vector3d v(1, 1, 0);
  Eigen::MatrixXd s = v * v.transpose();
  s(2, 2) = 1.0;
  const InfoMatrix out = rank_one_downdate(InfoMatrix(s), v * (1.0 + 1e-12));
  CHECK(out.clamped());
  CHECK(out.rank() == 1);
  CHECK_THROWS_AS(rank_one_downdate(InfoMatrix(s), 2.0 * v), NumericalError);
  const InfoMatrix exact = rank_one_downdate(InfoMatrix(Eigen::MatrixXd::Identity(2, 2) * 2),
                                             Eigen::Vector2d(1, 0));
  CHECK_FALSE(exact.clamped());
  CHECK(exact.logdet() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("updated adds the outer product") {
  const InfoMatrix a(Eigen::MatrixXd::Identity(2, 2));
  const InfoMatrix b = a.updated(Eigen::Vector2d(1, 1));
  CHECK(b.logdet() == doctest::Approx(std::log(3.0)));
  CHECK(b.updated(Eigen::Vector2d(1, 1), -1.0).logdet() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("+-1 to 0/1 transform divides the Gram determinant by 2^(2(p-1))") {
  Eigen::MatrixXi h(4, 4);
  h << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  const Eigen::MatrixXi z = pm1_to_01_transform(h);
  CHECK((z.row(0).array() == 1).all());
  CHECK(((z.array() == 0) || (z.array() == 1)).all());
  const Eigen::MatrixXd hd = h.cast<double>(), zd = z.cast<double>();
  CHECK(oracle::det(zd * zd.transpose()) ==
        doctest::Approx(oracle::det(hd * hd.transpose()) / std::pow(2.0, 6)));
  Eigen::MatrixXi bad = h;
  bad(0, 0) = 0;
  CHECK_THROWS_AS(pm1_to_01_transform(bad), std::invalid_argument);
}

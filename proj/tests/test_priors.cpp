#include "globest/priors.hpp"

#include "helpers.hpp"

using namespace globest;
using namespace testutil;

TEST_CASE("prior densities") {
  Prior u = Prior::uniform();
  for (double t : {-3.0, 0.0, 2.5}) CHECK(prior_pdf(u, t) == doctest::Approx(1 / (2 * M_PI)));
  CHECK_THROWS(prior_pdf(u, 4.0));

  Prior g = Prior::gaussian(0, 1);
  CHECK(prior_density_untruncated(g, 0.0) == doctest::Approx(1 / std::sqrt(2 * M_PI)));

  Prior b = Prior::beta(1, 1);
  for (double t : {-3.0, 0.1, 3.0}) CHECK(prior_pdf(b, t) == doctest::Approx(1 / (2 * M_PI)));
}

TEST_CASE("quadrature integrates densities to one") {
  std::vector<Prior> ps{Prior::uniform(), Prior::gaussian(0, 0.3), Prior::gaussian(0.5, 2.0), Prior::standard_mixture(0.3),
                        Prior::beta(2.0, 3.0), Prior::beta(0.7, 2.0)};
  for (const auto& p : ps) {
    auto q = prior_quadrature(p, p.nodes);
    double s = 0;
    for (double w : q.weight) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("second moments") {
  auto q = prior_quadrature(Prior::uniform(), 201);
  double m2 = 0;
  for (std::size_t i = 0; i < q.theta.size(); ++i) m2 += q.weight[i] * q.theta[i] * q.theta[i];
  CHECK(m2 == doctest::Approx(M_PI * M_PI / 3).epsilon(1e-10));

  // against a high-node oracle
  for (const auto& p : {Prior::gaussian(0.2, 0.8), Prior::beta(2.0, 3.0), Prior::standard_mixture(0.6)}) {
    auto a = prior_quadrature(p, 201), b = prior_quadrature(p, 1601);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.theta.size(); ++i) ma += a.weight[i] * a.theta[i] * a.theta[i];
    for (std::size_t i = 0; i < b.theta.size(); ++i) mb += b.weight[i] * b.theta[i] * b.theta[i];
    CHECK(ma == doctest::Approx(mb).epsilon(1e-8));
  }
}

TEST_CASE("averaged Choi operator of the phase channel") {
  auto avg = average_choi(ChannelSpec::phase_unitary(), 1, Prior::uniform());
  CMat expect = CMat::Zero(4, 4);
  expect(0, 0) = expect(3, 3) = 1;
  CHECK(max_abs(avg.cbar - expect) < 1e-10);
  CHECK(std::abs(std::abs(avg.tcbar(0, 3)) - 1.0) < 1e-10);
  CHECK(avg.m2 == doctest::Approx(M_PI * M_PI / 3).epsilon(1e-10));
  CHECK(avg.quadrature_change < 1e-8);
  CHECK(avg.q == 2);
  // H on the {|00>, |11>} block with off-diagonal modulus 1/2
  CHECK(std::abs(std::abs(avg.h(0, 3)) - 0.5) < 1e-9);
  CHECK(std::abs(avg.h(1, 1)) < 1e-12);
  CHECK(std::abs(avg.h(1, 2)) < 1e-12);
}

TEST_CASE("invariants of averaged data") {
  std::vector<std::pair<ChannelSpec, Prior>> cases{{ChannelSpec::preset("flagship"), Prior::uniform()},
                                                   {ChannelSpec::preset("flagship"), Prior::gaussian(0, 1.0)},
                                                   {random_parametrized_channel(3), Prior::standard_mixture(0.4)},
                                                   {ChannelSpec::preset("unitary"), Prior::beta(2.0)}};
  for (const auto& [ch, p] : cases) {
    auto a = average_choi(ch, 2, p);
    CHECK(max_abs(a.phi * a.phi.adjoint() - a.cbar) < 1e-9);
    CHECK((a.tcbar + a.h * a.cbar + a.cbar * a.h).norm() < 1e-8);
    CHECK(a.quadrature_change < 1e-8);
    CHECK(a.q == a.phi.cols());
    Eigen::SelfAdjointEigenSolver<CMat> es(a.cbar);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    CHECK(max_abs(a.h - a.h.adjoint()) < 1e-12);
  }
}

TEST_CASE("Lyapunov-type generator") {
  CMat c = CMat::Identity(4, 4);
  CHECK(max_abs(solve_H(c, CMat::Zero(4, 4))) < 1e-15);
  CMat z = pauli_z();
  CHECK(max_abs(solve_H(CMat::Identity(2, 2), z) + z / 2.0) < 1e-14);
}

TEST_CASE("ensemble factors") {
  CMat f = ensemble_factor(CMat::Identity(2, 2));
  CHECK(f.cols() == 2);
  CHECK(max_abs(f * f.adjoint() - CMat::Identity(2, 2)) < 1e-14);

  CMat c = CMat::Zero(4, 4);
  c(0, 0) = c(3, 3) = 1;
  CMat g = ensemble_factor(c);
  CHECK(g.cols() == 2);
  CHECK(max_abs(g * g.adjoint() - c) < 1e-14);

  CMat v = random_density(16, 3).leftCols(5);
  CMat r5 = v * v.adjoint();
  CMat h = ensemble_factor(r5);
  CHECK(h.cols() == 5);
  CHECK(max_abs(h * h.adjoint() - r5) < 1e-9);
}

TEST_CASE("prior validation and JSON") {
  CHECK_THROWS_AS(Prior::gaussian(0, -1).validate(), ConfigError);
  CHECK_THROWS_AS(prior_from_json(json{{"family", "cauchy"}}), ConfigError);
  try {
    prior_from_json(json{{"family", "cauchy"}});
  } catch (const ConfigError& e) {
    CHECK(e.field() == "family");
  }
  auto p = prior_from_json(json{{"family", "gaussian"}, {"mu", 0.0}, {"delta", 2.0}, {"support", {-3.14159, 3.14159}}, {"nodes", 201}});
  CHECK(p.delta == 2.0);
  auto back = prior_from_json(prior_to_json(p));
  CHECK(back.delta == p.delta);
  CHECK(back.lo == p.lo);
  auto s = prior_support(Prior::gaussian(0, 0.1));
  CHECK(s.lo == doctest::Approx(-1.0));
  CHECK(s.hi == doctest::Approx(1.0));
}

#include "helpers.hpp"

using namespace globest;
using namespace testutil;

TEST_CASE("kron of labeled operators") {
  LabeledOperator a(SpaceRegistry({{"A", 2}}), CMat::Identity(2, 2));
  LabeledOperator b(SpaceRegistry({{"B", 2}}), CMat::Identity(2, 2));
  auto ab = kron(a, b);
  CHECK(ab.registry().names() == std::vector<std::string>{"A", "B"});
  CHECK(max_abs(ab.matrix() - CMat::Identity(4, 4)) == 0.0);

  LabeledOperator za(SpaceRegistry({{"A", 2}}), pauli_z());
  LabeledOperator zb(SpaceRegistry({{"B", 2}}), pauli_z());
  CMat expect = CMat::Zero(4, 4);
  expect.diagonal() << 1, -1, -1, 1;
  CHECK(max_abs(kron(za, zb).matrix() - expect) == 0.0);

  CHECK_THROWS(kron(a, a));
}

TEST_CASE("kron of identity-channel Choi operators is rank one with trace four") {
  CVec v = CVec::Zero(4);
  v(0) = v(3) = 1;
  LabeledOperator e1(reg2("I1", 2, "O1", 2), v * v.adjoint());
  LabeledOperator e2(reg2("I2", 2, "O2", 2), v * v.adjoint());
  CMat k = kron(e1, e2).matrix();
  CHECK(k.trace().real() == doctest::Approx(4.0));
  Eigen::SelfAdjointEigenSolver<CMat> es(k);
  int rank = 0;
  for (long i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 1e-10;
  CHECK(rank == 1);
}

TEST_CASE("partial trace") {
  LabeledOperator id(reg2("A", 2, "B", 2), CMat::Identity(4, 4));
  std::vector<std::string> b{"B"};
  CHECK(max_abs(partial_trace(id, b).matrix() - 2.0 * CMat::Identity(2, 2)) < 1e-15);

  CVec bell = CVec::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  LabeledOperator phi(reg2("A", 2, "B", 2), bell * bell.adjoint());
  CHECK(max_abs(partial_trace(phi, b).matrix() - 0.5 * CMat::Identity(2, 2)) < 1e-15);

  for (int s = 0; s < 5; ++s) {
    CMat rho = random_density(3, s), sigma = random_density(2, 100 + s) * 1.7;
    LabeledOperator x = kron(LabeledOperator(SpaceRegistry({{"A", 3}}), rho), LabeledOperator(SpaceRegistry({{"B", 2}}), sigma));
    CHECK(max_abs(partial_trace(x, b).matrix() - sigma.trace() * rho) < 1e-12);
    CHECK(std::abs(partial_trace(x, b).matrix().trace() - x.matrix().trace()) < 1e-12);
  }
  std::vector<std::string> bad{"Q"};
  CHECK_THROWS(partial_trace(id, bad));
}

TEST_CASE("trace and replace") {
  SpaceRegistry r({{"A", 2}, {"Q", 2}, {"B", 3}});
  std::vector<std::string> q{"Q"};
  LabeledOperator id(r, CMat::Identity(12, 12));
  CHECK(max_abs(trace_replace(id, q).matrix() - CMat::Identity(12, 12)) < 1e-14);

  LabeledOperator z(SpaceRegistry({{"Q", 2}}), pauli_z());
  CHECK(max_abs(trace_replace(z, q).matrix()) < 1e-15);

  for (int s = 0; s < 10; ++s) {
    LabeledOperator a(r, random_hermitian(12, s));
    LabeledOperator b(r, random_hermitian(12, 50 + s));
    auto ta = trace_replace(a, q);
    CHECK(max_abs(trace_replace(ta, q).matrix() - ta.matrix()) < 1e-12);
    CHECK(std::abs(ta.matrix().trace() - a.matrix().trace()) < 1e-12);
    cd lhs = (a.matrix() * trace_replace(b, q).matrix()).trace();
    cd rhs = (ta.matrix() * b.matrix()).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("partial trace and trace-replace commute on disjoint sets") {
  SpaceRegistry r({{"A", 2}, {"Q", 2}, {"B", 3}});
  std::vector<std::string> q{"Q"}, b{"B"};
  for (int s = 0; s < 10; ++s) {
    LabeledOperator a(r, random_hermitian(12, 200 + s));
    CMat x = partial_trace(trace_replace(a, q), b).matrix();
    CMat y = trace_replace(partial_trace(a, b), q).matrix();
    CHECK(max_abs(x - y) < 1e-12);
  }
}

TEST_CASE("hermitian eigendecomposition") {
  auto ez = herm_eig(pauli_z());
  CHECK(ez.values(0) == doctest::Approx(1.0));
  CHECK(ez.values(1) == doctest::Approx(-1.0));
  CHECK(std::abs(std::abs(ez.vectors(0, 0)) - 1.0) < 1e-12);

  auto ex = herm_eig(pauli_x());
  CHECK(ex.values(0) == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(ex.vectors(0, 0)) - 1 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(std::abs(ex.vectors(1, 0)) - 1 / std::sqrt(2.0)) < 1e-12);

  double worst = 0, worst_u = 0;
  for (int s = 0; s < 100; ++s) {
    CMat a = random_hermitian(16, 1000 + s);
    auto e = herm_eig(a);
    for (long i = 0; i + 1 < e.values.size(); ++i) CHECK(e.values(i) >= e.values(i + 1));
    CMat rec = e.vectors * e.values.cast<cd>().asDiagonal() * e.vectors.adjoint();
    worst = std::max(worst, max_abs(rec - a) / max_abs(a));
    worst_u = std::max(worst_u, max_abs(e.vectors.adjoint() * e.vectors - CMat::Identity(16, 16)));
  }
  CHECK(worst < 1e-10);
  CHECK(worst_u < 1e-12);

  CMat bad(2, 2);
  bad << 1, 2, 0, 1;
  CHECK_THROWS(herm_eig(bad));
}

TEST_CASE("deterministic eigendecomposition") {
  CMat a = random_hermitian(16, 77);
  auto e1 = herm_eig(a), e2 = herm_eig(a);
  CHECK((e1.vectors.array() == e2.vectors.array()).all());
  CHECK((e1.values.array() == e2.values.array()).all());
}

TEST_CASE("symmetric logarithmic derivative") {
  CMat half = 0.5 * CMat::Identity(2, 2);
  CHECK(max_abs(solve_sld(half, CMat::Zero(2, 2)).s) < 1e-15);
  CHECK(max_abs(solve_sld(half, 0.15 * pauli_z()).s - 0.3 * pauli_z()) < 1e-14);

  CMat r = CMat::Zero(2, 2);
  r(0, 0) = 0.75;
  r(1, 1) = 0.25;
  auto s = solve_sld(r, pauli_x() / 4.0);
  CHECK(max_abs(s.s - pauli_x() / 2.0) < 1e-14);
  CHECK(s.support_rank == 2);

  for (int k = 0; k < 10; ++k) {
    // rank-deficient R
    CMat v = random_density(6, 300 + k).leftCols(3);
    CMat rr = v * v.adjoint();
    CMat m = random_hermitian(6, 400 + k);
    auto res = solve_sld(rr, m);
    auto e = herm_eig(rr);
    // only the kernel-kernel block of m is out of reach
    CMat ker = e.vectors.rightCols(6 - res.support_rank);
    CMat reach = m - ker * ker.adjoint() * m * ker * ker.adjoint();
    CHECK((0.5 * (rr * res.s + res.s * rr) - reach).norm() < 1e-9);
    CHECK((ker.adjoint() * res.s * ker).norm() < 1e-12);
    CHECK(res.support_rank == 3);
  }
}

TEST_CASE("pseudoinverse") {
  CHECK(max_abs(pinv(CMat::Identity(3, 3)) - CMat::Identity(3, 3)) < 1e-15);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 2;
  CMat pd = pinv(d);
  CHECK(pd(0, 0).real() == doctest::Approx(0.5));
  CHECK(std::abs(pd(1, 1)) < 1e-15);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  CMat a(16, 5);
  for (long i = 0; i < 16; ++i)
    for (long j = 0; j < 5; ++j) {
      double re = nd(rng);
      double im = nd(rng);
      a(i, j) = cd(re, im);
    }
  CMat p = pinv(a);
  CHECK(max_abs(p * a - CMat::Identity(5, 5)) < 1e-10);
  CHECK(max_abs(a * p * a - a) < 1e-10);
  CHECK(max_abs(p * a * p - p) < 1e-10);
  CHECK(max_abs((a * p).adjoint() - a * p) < 1e-10);
  CHECK(max_abs((p * a).adjoint() - p * a) < 1e-10);
}

TEST_CASE("registry bookkeeping") {
  auto r = SpaceRegistry::copies(2);
  CHECK(r.names() == std::vector<std::string>{"I1", "O1", "I2", "O2"});
  CHECK(r.input_dim() == 4);
  CHECK(r.output_dim() == 4);
  CHECK(r.total_dim() == 16);
  CHECK_THROWS(SpaceRegistry({{"A", 2}, {"A", 3}}));
  CHECK_THROWS(SpaceRegistry({{"A", 0}}));
}

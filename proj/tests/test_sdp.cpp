#include "globest/sdp.hpp"

#include "globest/strategies.hpp"
#include "helpers.hpp"

using namespace globest;
using namespace testutil;

namespace {

double inner_value(const CMat& xt, const AveragedData& avg) {
  SdpData data = SdpData::from(avg);
  auto bp = build_inner(xt, data);
  auto r = solve_sdp(bp.real);
  REQUIRE(r.ok());
  return r.dual_objective;
}

struct Solved {
  double primal, dual;
};

Solved solve_both(const StrategyClass& k, const AveragedData& avg) {
  SdpData data = SdpData::from(avg);
  auto bp = build_primal(k, data);
  auto rp = solve_sdp(bp.real);
  REQUIRE(rp.ok());
  auto bd = build_dual(k, data);
  auto rd = solve_sdp(bd.real);
  REQUIRE(rd.ok());
  auto pw = primal_from_y(bp, rp.y, data);
  auto dw = dual_from_y(bd, rd.y, data);
  return {pw.objective, dw.lambda};
}

}  // namespace

TEST_CASE("real embedding") {
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  RMat e = embed_real(d);
  RVec diag(4);
  diag << 1, 2, 1, 2;
  CHECK((e.diagonal() - diag).cwiseAbs().maxCoeff() == 0.0);
  for (int s = 0; s < 10; ++s) {
    CMat m = random_hermitian(6, s);
    double a = Eigen::SelfAdjointEigenSolver<CMat>(m).eigenvalues().minCoeff();
    double b = Eigen::SelfAdjointEigenSolver<RMat>(embed_real(m)).eigenvalues().minCoeff();
    CHECK(std::abs(a - b) < 1e-12);
    CHECK(max_abs(complex_from_real(embed_real(m)) - 2.0 * m) < 1e-15);
    RMat x = embed_real(random_hermitian(6, 50 + s));
    double lhs = (embed_real(m) * x).trace();
    double rhs = (m * complex_from_real(x)).trace().real();
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("trace-one problem through the embedding") {
  // max tr Z s.t. Z >= 0, tr Z = 1, as min tr(-Z)
  HermitianProblem hp;
  hp.block_dims = {3};
  hp.block_names = {"Z"};
  hp.c = {-CMat::Identity(3, 3)};
  HermCoef id{0, {}};
  for (int i = 0; i < 3; ++i) id.entries.push_back({i, i, cd(1, 0)});
  hp.a = {{id}};
  hp.b = RVec::Ones(1);
  hp.groups = {{"t", 0, 1}};
  auto r = solve_sdp(complex_to_real(hp));
  REQUIRE(r.ok());
  CHECK(-r.primal_objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(-r.dual_objective == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Omega is positive semidefinite") {
  auto avg = average_choi(ChannelSpec::preset("flagship"), 1, Prior::uniform());
  SdpData data = SdpData::from(avg);
  CMat zero = CMat::Zero(data.q, data.q);
  CMat hs = data.h.conjugate(), ps = data.phi.conjugate();
  CHECK(max_abs(build_omega(zero, data) - 4.0 * hs * ps * ps.adjoint() * hs.adjoint()) < 1e-13);
  SdpData z = SdpData::from(1, data.dims, CMat::Zero(data.d, data.d), data.phi);
  CHECK(max_abs(build_omega(zero, z)) == 0.0);
  double worst = 0;
  for (int s = 0; s < 100; ++s) {
    CMat h = random_hermitian(4, s) * 0.3;
    CMat phi = random_density(4, 200 + s).leftCols(data.q);
    SdpData r = SdpData::from(1, data.dims, h, phi);
    CMat om = build_omega(random_hermitian(data.q, 400 + s), r);
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<CMat>(om).eigenvalues().minCoeff());
    CHECK(max_abs(om - om.adjoint()) < 1e-12);
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("hermitian coordinate basis") {
  auto b = hermitian_basis(3);
  CHECK(b.size() == 9);
  RVec y = RVec::LinSpaced(9, -1, 1);
  CMat m = hermitian_from_coords(y, 3);
  CMat acc = CMat::Zero(3, 3);
  for (int i = 0; i < 9; ++i) acc += y(i) * b[i];
  CHECK(max_abs(m - acc) < 1e-15);
  CHECK(max_abs(m - m.adjoint()) < 1e-15);
}

TEST_CASE("inner problem oracles") {
  auto u1 = average_choi(ChannelSpec::preset("unitary"), 1, Prior::uniform());
  auto plus = parallel_strategy(plus_state(), 1);
  CHECK(inner_value(plus.reduced(), u1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(info_gain_direct(plus, u1).j == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(inner_value_lsq(plus.reduced(), SdpData::from(u1)) == doctest::Approx(1.0).epsilon(1e-9));

  auto u2 = average_choi(ChannelSpec::preset("unitary"), 2, Prior::uniform());
  auto ghz = parallel_strategy(ghz_state(2), 2);
  CHECK(inner_value(ghz.reduced(), u2) == doctest::Approx(0.25).epsilon(1e-6));
  auto zero = parallel_strategy(CVec::Unit(4, 0), 2);
  CHECK(std::abs(inner_value(zero.reduced(), u2)) < 1e-7);
}

TEST_CASE("inner value never exceeds the class optimum") {
  auto f2 = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  Solved s = solve_both(StrategyClass::parallel(), f2);
  for (int t = 0; t < 3; ++t) {
    auto st = parallel_strategy(random_state(8, t), 2, 2);
    CHECK(inner_value(st.reduced(), f2) <= s.primal + 1e-7);
  }
}

TEST_CASE("flagship and unitary optima for two uses") {
  auto f2 = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  Solved a = solve_both(StrategyClass::parallel(), f2);
  CHECK(a.primal >= 0.5510);
  CHECK(a.primal <= 0.5520);
  CHECK(a.dual - a.primal >= -1e-8);
  CHECK(a.dual - a.primal < 1e-6);
  Solved b = solve_both(StrategyClass::sequential(), f2);
  CHECK(b.dual >= 0.5570);
  CHECK(b.dual <= 0.5576);
  Solved c = solve_both(StrategyClass::causal_superposition(), f2);
  Solved d = solve_both(StrategyClass::general_ico(), f2);
  CHECK(a.primal <= b.primal + 1e-7);
  CHECK(b.primal <= c.primal + 1e-7);
  CHECK(c.primal <= d.primal + 1e-7);

  auto u2 = average_choi(ChannelSpec::preset("unitary"), 2, Prior::uniform());
  Solved u = solve_both(StrategyClass::parallel(), u2);
  CHECK(u.primal >= 1.5216);
  CHECK(u.primal <= 1.5219);
}

TEST_CASE("dual with no information") {
  auto avg = average_choi(ChannelSpec::bit_flip(0.4), 2, Prior::uniform());
  CHECK(max_abs(avg.h) < 1e-12);
  for (const auto& k : {StrategyClass::parallel(), StrategyClass::general_ico()}) {
    Solved s = solve_both(k, avg);
    CHECK(std::abs(s.dual) < 1e-7);
    CHECK(std::abs(s.primal) < 1e-7);
  }
}

TEST_CASE("primal and dual agree on random channels") {
  for (int s = 0; s < 4; ++s) {
    auto avg = average_choi(random_parametrized_channel(300 + s), 2, Prior::uniform());
    for (const auto& k : {StrategyClass::parallel(), StrategyClass::sequential({2, 1}), StrategyClass::general_ico()}) {
      Solved r = solve_both(k, avg);
      CHECK(r.dual - r.primal > -1e-7);
      CHECK(r.dual - r.primal < 1e-6);
    }
  }
}

TEST_CASE("witnesses from multipliers match independent solves") {
  auto f2 = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  SdpData data = SdpData::from(f2);
  auto bp = build_primal(StrategyClass::parallel(), data);
  auto rp = solve_sdp(bp.real);
  REQUIRE(rp.ok());
  auto dw = dual_from_multiplier(bp, rp.x, data);
  auto pw = primal_from_y(bp, rp.y, data);
  CHECK(dw.lambda == doctest::Approx(pw.objective).epsilon(1e-6));
  CHECK(is_valid_tester(StrategyClass::parallel(), pw.xt, 2, 1e-7).valid);
  CHECK(std::abs(primal_objective(pw, data) - pw.objective) < 1e-12);
}

TEST_CASE("random strategies: direct, inner and least squares agree") {
  auto c = check_oracle_triangle(11, 4);
  CHECK_MESSAGE(c.passed, c.detail);
}

TEST_CASE("superposition decomposition of a sequential tester") {
  CMat q = sequential_strategy(random_state(4, 1), {haar_unitary(4, 2)}, 2, 2).reduced();
  auto d = superposition_decomposition(q, 2);
  CHECK(d.linear_residual < 1e-7);
  CHECK(d.margin > -1e-7);
}

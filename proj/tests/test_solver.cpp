#include "globest/solver.hpp"

#include <cstdlib>
#include <random>

#include "globest/kernels.hpp"
#include "helpers.hpp"

using namespace globest;
using namespace testutil;

namespace {

// min <c, X> s.t. tr X = 1 over one symmetric block.
ConicProblem trace_one(const RMat& c) {
  const long n = c.rows();
  ConicProblem p;
  p.block_sizes = {static_cast<int>(n)};
  p.block_names = {"X"};
  std::vector<Eigen::Triplet<double>> t;
  for (long i = 0; i < n; ++i) t.emplace_back(0, i * n + i, 1.0);
  p.a.resize(1, n * n);
  p.a.setFromTriplets(t.begin(), t.end());
  p.b = RVec::Ones(1);
  p.c = Eigen::Map<const RVec>(c.data(), n * n);
  return p;
}

RMat random_symmetric(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  RMat g(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) g(i, j) = nd(rng);
  return (g + g.transpose()) / 2;
}

}  // namespace

TEST_CASE("minimum of a diagonal objective") {
  RMat c = RMat::Zero(2, 2);
  c(0, 0) = 1;
  c(1, 1) = 2;
  auto r = solve_sdp(trace_one(c));
  REQUIRE(r.ok());
  CHECK(r.primal_objective == doctest::Approx(1.0).epsilon(1e-8));
  auto x = unpack_blocks(trace_one(c), r.x);
  CHECK(x[0](0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(x[0](1, 1)) < 1e-7);
}

TEST_CASE("largest eigenvalue of sigma_x") {
  RMat c(2, 2);
  c << 0, -1, -1, 0;
  auto r = solve_sdp(trace_one(c));
  REQUIRE(r.ok());
  CHECK(-r.primal_objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(-r.dual_objective == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("largest eigenvalue against a dense eigensolver") {
  double worst = 0;
  for (int s = 0; s < 50; ++s) {
    RMat a = random_symmetric(8, s);
    auto r = solve_sdp(trace_one(-a));
    REQUIRE(r.ok());
    double ref = Eigen::SelfAdjointEigenSolver<RMat>(a).eigenvalues().maxCoeff();
    worst = std::max(worst, std::abs(-r.primal_objective - ref));
    // weak duality within tolerance
    CHECK(r.primal_objective - r.dual_objective > -1e-9 * (1 + std::abs(r.primal_objective)));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("complex eigenvalue SDP suite") {
  auto c = check_eigen_sdp(3, 20);
  CHECK_MESSAGE(c.passed, c.detail);
}

TEST_CASE("free variables and multiple blocks") {
  // min x0 + tr(X) with x0 free, X 2x2: x0 - X11 = -1, X22 = 0.5, X12 = 0.
  ConicProblem p;
  p.free_count = 1;
  p.block_sizes = {2};
  std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {0, 1, -1.0}, {1, 4, 1.0}, {2, 2, 0.5}, {2, 3, 0.5}};
  p.a.resize(3, 5);
  p.a.setFromTriplets(t.begin(), t.end());
  p.b = RVec(3);
  p.b << -1, 0.5, 0;
  p.c = RVec::Zero(5);
  p.c << 1, 1, 0, 0, 1;
  auto r = solve_sdp(p);
  REQUIRE(r.ok());
  // x0 = X11 - 1, objective = 2 X11 - 1 + 0.5, minimized at X11 = 0
  CHECK(r.primal_objective == doctest::Approx(-0.5).epsilon(1e-7));
}

TEST_CASE("deterministic and thread-independent iterates") {
  RMat a = random_symmetric(12, 99);
  SolverConfig par, ser;
  ser.parallel = false;
  auto r1 = solve_sdp(trace_one(a), par);
  auto r2 = solve_sdp(trace_one(a), par);
  auto r3 = solve_sdp(trace_one(a), ser);
  CHECK(r1.iterations == r2.iterations);
  CHECK((r1.x.array() == r2.x.array()).all());
  CHECK((r1.y.array() == r3.y.array()).all());
  CHECK((r1.x.array() == r3.x.array()).all());
  setenv("GLOBEST_WORKERS", "3", 1);
  auto r4 = solve_sdp(trace_one(a), par);
  unsetenv("GLOBEST_WORKERS");
  CHECK((r4.x.array() == r3.x.array()).all());
  CHECK((r4.y.array() == r3.y.array()).all());
}

TEST_CASE("infeasible problems are reported") {
  // tr X = -1 with X >= 0
  RMat c = RMat::Identity(2, 2);
  ConicProblem p = trace_one(c);
  p.b(0) = -1;
  auto r = solve_sdp(p);
  CHECK_FALSE(r.ok());
}

TEST_CASE("problem validation") {
  ConicProblem p = trace_one(RMat::Identity(2, 2));
  p.c = RVec::Zero(3);
  CHECK_THROWS(solve_sdp(p));
  ConicProblem q = trace_one(RMat::Identity(2, 2));
  q.c(1) = 5;  // non-symmetric cone data
  CHECK_THROWS(solve_sdp(q));
}

TEST_CASE("problem export round trip") {
  ConicProblem p = trace_one(random_symmetric(3, 1));
  ConicProblem q = import_problem(export_problem(p));
  CHECK(q.block_sizes == p.block_sizes);
  CHECK((q.c.array() == p.c.array()).all());
  CHECK((RMat(q.a) - RMat(p.a)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("moment kernels agree serially and in parallel") {
  std::vector<double> th{-1.0, -0.2, 0.4, 1.3}, w{0.1, 0.4, 0.3, 0.2};
  auto f = [](double t) {
    CMat m(2, 2);
    m << std::cos(t), cd(0, t), cd(0, -t), std::sin(t);
    return m;
  };
  auto a = kernels::moments_serial(f, th, w);
  for (const char* workers : {"1", "3"}) {
    setenv("GLOBEST_WORKERS", workers, 1);
    auto b = kernels::moments_parallel(f, th, w);
    CHECK((a.c.array() == b.c.array()).all());
    CHECK((a.tc.array() == b.tc.array()).all());
    CHECK(a.m2 == b.m2);
  }
  unsetenv("GLOBEST_WORKERS");
}

#include "globest/invariants.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>

#include "globest/rational.hpp"

namespace globest {

CMat random_hermitian(long d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMat g(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      double re = nd(rng);
      double im = nd(rng);
      g(i, j) = cd(re, im);
    }
  return (g + g.adjoint()) / 2.0;
}

namespace {

void note(CheckResult& r, double defect) {
  r.worst = std::max(r.worst, defect);
  ++r.cases;
}

void close(CheckResult& r) {
  r.passed = r.passed && r.worst <= r.tol;
  if (r.detail.empty()) {
    std::ostringstream os;
    os << "worst defect " << r.worst << " over " << r.cases << " cases";
    r.detail = os.str();
  }
}

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

CheckResult check_projection_algebra(std::uint64_t seed, int count, double tol) {
  CheckResult r{"projection algebra", true, 0, tol, 0, ""};
  const int n = 2;
  const std::vector<int> dims(2 * n, 2);
  const long d = 16;
  struct Named {
    std::string name;
    MapTerms terms;
  };
  std::vector<Named> maps{{"parallel", parallel_terms(n)},
                          {"sequential 1,2", sequential_terms({1, 2}, n)},
                          {"sequential 2,1", sequential_terms({2, 1}, n)},
                          {"general", general_terms(n)}};
  const CMat id = CMat::Identity(d, d);
  std::string worst_name;
  double worst = -1;
  for (const auto& m : maps) {
    note(r, max_abs(apply_terms(m.terms, id, dims) - id));
    for (int t = 0; t < count; ++t) {
      CMat x = random_hermitian(d, seed * 1000 + t);
      CMat y = random_hermitian(d, seed * 1000 + t + 500);
      CMat lx = apply_terms(m.terms, x, dims);
      double defect = max_abs(apply_terms(m.terms, lx, dims) - lx);
      defect = std::max(defect, std::abs(lx.trace() - x.trace()));
      defect = std::max(defect, std::abs((y * lx).trace() - (apply_terms(m.terms, y, dims) * x).trace()));
      note(r, defect);
      if (defect > worst) {
        worst = defect;
        worst_name = m.name;
      }
    }
  }
  for (const auto& order : {std::vector<int>{1, 2}, std::vector<int>{2, 1}}) {
    MapTerms chain = sequential_chain_product(order, n);
    MapTerms sum = sequential_terms(order, n);
    for (int t = 0; t < count; ++t) {
      CMat x = random_hermitian(d, seed * 7000 + t);
      note(r, max_abs(apply_terms(chain, x, dims) - apply_terms(sum, x, dims)));
    }
  }
  close(r);
  if (!worst_name.empty()) r.detail += " (largest on " + worst_name + ")";
  return r;
}

CheckResult check_exact_psd(std::uint64_t seed, int count, double margin) {
  CheckResult r{"exact psd vs spectra", true, 0, 0, 0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 7);
  std::uniform_real_distribution<double> ev(-0.3, 1.0);
  std::uniform_int_distribution<int> digits(2, 6);
  long mismatches = 0, psd = 0, skipped = 0;
  int made = 0;
  for (int attempt = 0; made < count && attempt < 20 * count; ++attempt) {
    const int d = size(rng);
    CMat u = haar_unitary(d, rng());
    RVec lam(d);
    for (int i = 0; i < d; ++i) lam(i) = ev(rng);
    if (attempt % 3 == 0) lam = lam.cwiseAbs();
    CMat a = u * lam.cast<cd>().asDiagonal() * u.adjoint();
    QMat q = hermitize(rationalize(a, digits(rng)));
    Eigen::SelfAdjointEigenSolver<CMat> es(to_cmat(q), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (std::abs(lmin) <= margin) {
      ++skipped;
      continue;
    }
    ++made;
    const bool expect = lmin > 0;
    if (expect) ++psd;
    if (exact_psd(q) != expect || exact_psd_ldl(q) != expect) ++mismatches;
    ++r.cases;
  }
  r.worst = static_cast<double>(mismatches);
  r.passed = mismatches == 0 && made == count;
  std::ostringstream os;
  os << mismatches << " mismatches over " << r.cases << " matrices (" << psd << " PSD, " << skipped
     << " inside the margin skipped)";
  r.detail = os.str();
  return r;
}

CheckResult check_eigen_sdp(std::uint64_t seed, int count, double tol) {
  CheckResult r{"eigenvalue SDP vs eigensolver", true, 0, tol, 0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 10);
  for (int t = 0; t < count; ++t) {
    const int d = size(rng);
    CMat a = random_hermitian(d, rng());
    HermitianProblem hp;
    hp.block_dims = {d};
    hp.block_names = {"s"};
    hp.c = {a};
    HermCoef id{0, {}};
    for (int i = 0; i < d; ++i) id.entries.push_back({i, i, cd(1.0, 0.0)});
    hp.a = {{id}};
    hp.b = RVec::Ones(1);
    hp.groups = {{"t", 0, 1}};
    SolverResult res = solve_sdp(complex_to_real(hp));
    const double ref = Eigen::SelfAdjointEigenSolver<CMat>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (!res.ok()) {
      r.passed = false;
      note(r, 1.0);
      continue;
    }
    note(r, std::abs(res.dual_objective - ref));
  }
  close(r);
  return r;
}

CheckResult check_oracle_triangle(std::uint64_t seed, int count, double tol) {
  CheckResult r{"direct vs inner SDP", true, 0, tol, 0, ""};
  for (int t = 0; t < count; ++t) {
    const std::uint64_t s = seed * 100 + t;
    ChannelSpec ch = random_parametrized_channel(s, 4);
    AveragedData avg = average_choi(ch, 2, Prior::uniform());
    FixedStrategy st = t % 2 == 0 ? parallel_strategy(random_state(8, s), 2, 2)
                                  : sequential_strategy(random_state(4, s), {haar_unitary(4, s + 7)}, 2, 2);
    const double direct = info_gain_direct(st, avg).j;
    const SdpData data = SdpData::from(avg);
    BuiltProblem bp = build_inner(st.reduced(), data);
    SolverResult res = solve_sdp(bp.real);
    // Degenerate inner problems (low-rank testers) converge slowly; a small
    // residual run still brackets the optimum between its two objectives.
    const bool bracketed = res.primal_infeasibility < 1e-7 && res.dual_infeasibility < 1e-7;
    if (!res.ok() && !bracketed) {
      r.passed = false;
      note(r, 1.0);
      continue;
    }
    double defect = std::max(std::abs(direct - res.dual_objective), std::abs(direct - res.primal_objective));
    defect = std::max(defect, std::abs(direct - inner_value_lsq(st.reduced(), data)));
    note(r, defect);
  }
  close(r);
  return r;
}

CheckResult check_ite_random(std::uint64_t seed, int count, double tol) {
  CheckResult r{"imaginary-time identity", true, 0, tol, 0, ""};
  for (int t = 0; t < count; ++t) {
    const std::uint64_t s = seed * 100 + 50 + t;
    AveragedData avg = average_choi(random_parametrized_channel(s, 4), 2, Prior::uniform());
    FixedStrategy st = parallel_strategy(random_state(8, s), 2, 2);
    IteDiagnostics di = verify_ite(st, avg, 1e-5, tol);
    note(r, std::max({di.operator_defect, di.state_defect, di.rho_defect}));
  }
  close(r);
  return r;
}

std::vector<CheckResult> invariant_suite(std::uint64_t seed, bool quick) {
  const int f = quick ? 5 : 1;
  return {check_projection_algebra(seed, 50 / f), check_exact_psd(seed, 200 / f), check_eigen_sdp(seed, 50 / f),
          check_oracle_triangle(seed, quick ? 4 : 20), check_ite_random(seed, quick ? 2 : 10)};
}

json check_to_json(const CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}, {"tol", c.tol}, {"cases", c.cases}, {"detail", c.detail}};
}

}  // namespace globest

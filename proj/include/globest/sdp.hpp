#pragma once

#include <string>
#include <vector>

#include "globest/conic.hpp"
#include "globest/priors.hpp"
#include "globest/solver.hpp"
#include "globest/testers.hpp"

namespace globest {

struct HermEntry {
  int r = 0, c = 0;
  cd v;
};
using SparseHerm = std::vector<HermEntry>;  // full storage, both triangles

struct HermCoef {
  int block = 0;
  SparseHerm entries;
};

// Complex Hermitian standard form
//   (P) minimize tr(C Z) + offset  s.t. tr(A_i Z) = b_i, Z >= 0
//   (D) maximize b.y + offset      s.t. C - sum_i y_i A_i >= 0
struct HermitianProblem {
  std::vector<int> block_dims;
  std::vector<std::string> block_names;
  std::vector<CMat> c;
  std::vector<std::vector<HermCoef>> a;
  RVec b;
  double offset = 0;
  std::vector<VarGroup> groups;

  long m() const { return static_cast<long>(a.size()); }
  const VarGroup& group(const std::string& name) const;
};

RMat embed_real(const CMat& m);
// Adjoint of embed_real, so complex_from_real(embed_real(m)) == 2 m.
CMat complex_from_real(const RMat& r);
ConicProblem complex_to_real(const HermitianProblem& hp);
std::vector<CMat> evaluate_slack(const HermitianProblem& hp, const RVec& y);
// Complex multiplier blocks from a real-layout primal vector of the embedded problem.
std::vector<CMat> complex_multiplier(const HermitianProblem& hp, const ConicProblem& real, const RVec& x);

// Problem data shared by every strategy class.
struct SdpData {
  int n = 1;
  long d = 0, d_in = 0, d_out = 0;
  int q = 0;
  std::vector<int> dims;
  CMat h, phi;
  CMat a;  // conj(H) conj(Phi), d x q

  static SdpData from(const AveragedData& avg);
  static SdpData from(int n, const std::vector<int>& dims, const CMat& h, const CMat& phi);
};

struct HermBasis {
  std::vector<SparseHerm> elems;
  long d = 0;
};

HermBasis fixed_space_basis(const MapTerms& terms, std::span<const int> dims, bool traceless);
HermBasis kernel_basis(const MapTerms& terms, std::span<const int> dims);
std::vector<CMat> hermitian_basis(int q);
CMat hermitian_from_coords(const RVec& y, int q);
CMat dense(const SparseHerm& e, long d);

enum class ProblemForm { primal, dual, inner };

struct BuiltProblem {
  ProblemForm form = ProblemForm::primal;
  StrategyClass k;
  HermitianProblem herm;
  ConicProblem real;
  long d = 0, d_out = 0;
  int q = 0;
  CMat inner_support;  // inner form: columns span supp(X~)
};

BuiltProblem build_primal(const StrategyClass& k, const SdpData& data);
BuiltProblem build_dual(const StrategyClass& k, const SdpData& data);
// The inner maximization with the tester fixed; its optimum is J for that tester.
BuiltProblem build_inner(const CMat& xt, const SdpData& data);

struct PrimalWitness {
  CMat xt, xt1, xt2;  // xt = xt1 + xt2 for the causal-superposition class
  CMat b, c;
  double objective = 0;
};

struct DualWitness {
  CMat yt, yt1, yt2;
  CMat h;
  double lambda = 0;
};

double primal_objective(const PrimalWitness& w, const SdpData& data);
PrimalWitness primal_from_y(const BuiltProblem& primal, const RVec& y, const SdpData& data);
PrimalWitness primal_from_multiplier(const BuiltProblem& dual, const RVec& x, const SdpData& data);
DualWitness dual_from_y(const BuiltProblem& dual, const RVec& y, const SdpData& data);
DualWitness dual_from_multiplier(const BuiltProblem& primal, const RVec& x, const SdpData& data);

// Omega(h) = 4 (H* Phi* - i Phi* h)(H* Phi* - i Phi* h)^dagger
CMat build_omega(const CMat& h_small, const SdpData& data);
// min over Hermitian h of tr(X~ Omega(h)) by linear least squares.
double inner_value_lsq(const CMat& xt, const SdpData& data);

struct Decomposition {
  CMat x1, x2;
  double margin = -1e300;         // max t with x1 - t I >= 0 and x2 - t I >= 0
  double linear_residual = 1e300;
};
Decomposition superposition_decomposition(const CMat& xt, int n, const SolverConfig& cfg = {});

}  // namespace globest

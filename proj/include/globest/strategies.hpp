#pragma once

#include <string>
#include <vector>

#include "globest/priors.hpp"
#include "globest/testers.hpp"

namespace globest {

// A complete estimation arrangement: X on I1,O1,...,IN,ON followed by the output parts.
struct FixedStrategy {
  LabeledOperator x;
  int copies = 1;
  StrategyClass declared;
  std::string descriptor;

  std::vector<std::string> output_names() const;
  // tr_F X on I1,O1,...,IN,ON.
  CMat reduced() const;
};

// psi on I1..IN followed by an ancilla of dimension ancilla_dim.
FixedStrategy parallel_strategy(const CVec& psi, int n, int ancilla_dim = 1);
// psi on I1 (x) ancilla; O_k is wired straight into I_{k+1}.
FixedStrategy sequential_no_control(const CVec& psi, int n, int ancilla_dim = 1);
// psi on I1 (x) A; controls[k] acts on (O_{k+1}, A) and feeds (I_{k+2}, A).
FixedStrategy sequential_strategy(const CVec& psi, const std::vector<CMat>& controls, int n, int ancilla_dim);

CVec ghz_state(int n);
CVec plus_state();
// sqrt(3/10)|0000> + sqrt(1/5)|0101> + sqrt(1/5)|1010> + sqrt(3/10)|1111>, two system then two ancilla qubits.
CVec candidate_state();
CVec random_state(int dim, std::uint64_t seed);

// X * C for C on the copies registry; the result lives on the output parts.
LabeledOperator apply_strategy(const FixedStrategy& s, const CMat& c);

struct InfoGain {
  double j = 0;
  CMat rho, trho, s;
  double sld_residual = 0;
};
// J = tr(rho S^2) with (rho S + S rho)/2 = theta-rho, rho = X * Cbar.
InfoGain info_gain_direct(const FixedStrategy& s, const AveragedData& avg);

struct IteDiagnostics {
  double operator_defect = 0;  // |(Cbar(d) - Cbar(-d))/(2d) - theta Cbar|_max
  double state_defect = 0;     // the same after the link product with the strategy
  double rho_defect = 0;       // |X * Cbar(0) - rho|_max
  double trace_at_tenth = 1;   // tr(X * Cbar(0.1))
  double tol = 1e-8;
  bool ok = false;
};
// Finite-difference check of d/dtau Cbar(tau) at 0 against theta Cbar.
IteDiagnostics verify_ite(const AveragedData& avg, double step = 1e-5, double tol = 1e-8);
IteDiagnostics verify_ite(const FixedStrategy& s, const AveragedData& avg, double step = 1e-5, double tol = 1e-8);

}  // namespace globest

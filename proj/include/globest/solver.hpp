#pragma once

#include <memory>
#include <string>

#include "globest/conic.hpp"

namespace globest {

struct SolverConfig {
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iter = 200;
  double step_fraction = 0.98;
  bool parallel = true;  // OpenMP Schur-complement assembly
  bool verbose = false;
  // Accept a stalled run whose residuals are below this level as near-optimal.
  double stall_accept = 1e-7;
};

enum class SolverStatus { optimal, near_optimal, primal_infeasible, dual_infeasible, max_iter, numerical };
std::string to_string(SolverStatus s);

struct SolverResult {
  SolverStatus status = SolverStatus::numerical;
  RVec x, y, z;  // x and z in the problem's cone layout
  double primal_objective = 0, dual_objective = 0;
  double relative_gap = 0, primal_infeasibility = 0, dual_infeasibility = 0;
  int iterations = 0;
  std::string message;

  bool ok() const { return status == SolverStatus::optimal || status == SolverStatus::near_optimal; }
};

class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SolverResult solve(const ConicProblem& p, const SolverConfig& cfg) const = 0;
};

// Primal-dual path following with the HKM direction and Mehrotra predictor-corrector.
class InteriorPointBackend : public SdpBackend {
 public:
  std::string name() const override { return "hkm-ipm"; }
  SolverResult solve(const ConicProblem& p, const SolverConfig& cfg) const override;
};

SolverResult solve_sdp(const ConicProblem& p, const SolverConfig& cfg = {}, const SdpBackend* backend = nullptr);

}  // namespace globest

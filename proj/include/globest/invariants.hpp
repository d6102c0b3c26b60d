#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "globest/pipeline.hpp"

namespace globest {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0;  // largest observed defect
  double tol = 0;
  long cases = 0;
  std::string detail;
};

CMat random_hermitian(long d, std::uint64_t seed);

// Idempotence, unitality, trace preservation and self-adjointness of the class
// projectors for two channel uses, plus the product form of the sequential one.
CheckResult check_projection_algebra(std::uint64_t seed, int count = 50, double tol = 1e-12);
// exact_psd against floating spectra on random rational Hermitian matrices whose
// smallest eigenvalue is at least margin away from zero.
CheckResult check_exact_psd(std::uint64_t seed, int count = 200, double margin = 1e-9);
// max t s.t. A - t I >= 0 against a dense eigensolver.
CheckResult check_eigen_sdp(std::uint64_t seed, int count = 50, double tol = 1e-7);
// Direct information gain against the inner SDP and the least-squares form.
CheckResult check_oracle_triangle(std::uint64_t seed, int count = 20, double tol = 1e-6);
// Finite-difference imaginary-time identity on random channels.
CheckResult check_ite_random(std::uint64_t seed, int count = 10, double tol = 1e-8);

std::vector<CheckResult> invariant_suite(std::uint64_t seed, bool quick);
json check_to_json(const CheckResult& c);

}  // namespace globest

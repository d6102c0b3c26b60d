#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "globest/spaces.hpp"

namespace globest {

enum class StrategyKind { parallel, sequential, causal_superposition, general_ico };

struct StrategyClass {
  StrategyKind kind = StrategyKind::parallel;
  std::vector<int> order;  // sequential only, 1-based query order

  static StrategyClass parallel() { return {StrategyKind::parallel, {}}; }
  static StrategyClass sequential(std::vector<int> order = {}) { return {StrategyKind::sequential, std::move(order)}; }
  static StrategyClass causal_superposition() { return {StrategyKind::causal_superposition, {}}; }
  static StrategyClass general_ico() { return {StrategyKind::general_ico, {}}; }

  std::string roman() const;  // i, ii, iii, iv
  std::string name() const;
  static StrategyClass parse(const std::string& s);
};

// A linear map written as sum_t coef_t * TR_{mask_t}, where TR_0 is the identity.
struct MapTerm {
  int coef = 1;
  std::uint32_t mask = 0;
};
using MapTerms = std::vector<MapTerm>;

MapTerms simplify(MapTerms t);
MapTerms compose(const MapTerms& a, const MapTerms& b);  // a o b
MapTerms add(const MapTerms& a, const MapTerms& b, int sign = 1);
MapTerms identity_terms();

// Masks refer to SpaceRegistry::copies(n): I_k at 2(k-1), O_k at 2(k-1)+1.
std::uint32_t input_bit(int k);
std::uint32_t output_bit(int k);

MapTerms parallel_terms(int n);
MapTerms sequential_terms(const std::vector<int>& order, int n);
MapTerms general_terms(int n);
// The two orders used by the causal-superposition class (n = 2 only).
std::vector<MapTerms> superposition_terms(int n);

// Terms for the class; throws for causal_superposition (use superposition_terms).
MapTerms lambda_terms(const StrategyClass& k, int n);

// The chain-of-equalities form of the sequential constraint, written as a product of
// complementary projections: prod_j (id - P_j).
MapTerms sequential_chain_product(const std::vector<int>& order, int n);

template <class Mat>
Mat apply_terms(const MapTerms& terms, const Mat& a, std::span<const int> dims) {
  using T = MatTraits<Mat>;
  Mat out = T::zero(a.rows());
  for (const auto& t : terms) {
    Mat r = trace_replace_mask(a, dims, t.mask);
    for (long i = 0; i < a.rows(); ++i)
      for (long j = 0; j < a.rows(); ++j) {
        auto v = r(i, j);
        T::mul(v, t.coef);
        out(i, j) += v;
      }
  }
  return out;
}

CMat lambda_apply(const StrategyClass& k, const CMat& x, int n);
LabeledOperator lambda_apply(const StrategyClass& k, const LabeledOperator& x);

// Sparse image of the matrix unit E_{ab} under the map.
struct UnitImage {
  std::vector<long> unit;  // row * d + col
  std::vector<double> coef;
};
UnitImage unit_image(const MapTerms& terms, std::span<const int> dims, long a, long b);

struct TesterDiagnostics {
  bool valid = false;
  double min_eigenvalue = 0;
  double fixed_point_residual = 0;
  double trace_error = 0;
  double decomposition_margin = 0;  // causal superposition only
  std::string message;
};

TesterDiagnostics is_valid_tester(const StrategyClass& k, const CMat& xt, int n, double tol = 1e-8);

}  // namespace globest

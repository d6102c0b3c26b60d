#include "globest/testers.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "globest/json_io.hpp"
#include "globest/sdp.hpp"

namespace globest {

std::string StrategyClass::roman() const {
  switch (kind) {
    case StrategyKind::parallel: return "i";
    case StrategyKind::sequential: return "ii";
    case StrategyKind::causal_superposition: return "iii";
    case StrategyKind::general_ico: return "iv";
  }
  return "";
}

std::string StrategyClass::name() const {
  switch (kind) {
    case StrategyKind::parallel: return "parallel";
    case StrategyKind::sequential: return "sequential";
    case StrategyKind::causal_superposition: return "causal_superposition";
    case StrategyKind::general_ico: return "general_ico";
  }
  return "";
}

StrategyClass StrategyClass::parse(const std::string& s) {
  if (s == "i" || s == "parallel") return parallel();
  if (s == "ii" || s == "sequential") return sequential();
  if (s == "iii" || s == "causal_superposition" || s == "superposition") return causal_superposition();
  if (s == "iv" || s == "general_ico" || s == "general") return general_ico();
  throw ConfigError("class", "unknown strategy class '" + s + "'");
}

std::uint32_t input_bit(int k) { return 1u << (2 * (k - 1)); }
std::uint32_t output_bit(int k) { return 1u << (2 * (k - 1) + 1); }

MapTerms simplify(MapTerms t) {
  std::map<std::uint32_t, int> acc;
  for (const auto& x : t) acc[x.mask] += x.coef;
  MapTerms out;
  for (const auto& [m, c] : acc)
    if (c != 0) out.push_back({c, m});
  return out;
}

MapTerms compose(const MapTerms& a, const MapTerms& b) {
  MapTerms out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back({x.coef * y.coef, x.mask | y.mask});
  return simplify(out);
}

MapTerms add(const MapTerms& a, const MapTerms& b, int sign) {
  MapTerms out = a;
  for (const auto& y : b) out.push_back({sign * y.coef, y.mask});
  return simplify(out);
}

MapTerms identity_terms() { return {{1, 0u}}; }

MapTerms parallel_terms(int n) {
  std::uint32_t m = 0;
  for (int k = 1; k <= n; ++k) m |= output_bit(k);
  return {{1, m}};
}

namespace {

std::vector<int> resolve_order(const std::vector<int>& order, int n) {
  if (order.empty()) {
    std::vector<int> o(n);
    for (int k = 0; k < n; ++k) o[k] = k + 1;
    return o;
  }
  if (static_cast<int>(order.size()) != n) throw ConfigError("order", "order must list every channel use once");
  auto s = order;
  std::sort(s.begin(), s.end());
  for (int k = 0; k < n; ++k)
    if (s[k] != k + 1) throw ConfigError("order", "order must be a permutation of 1..n");
  return order;
}

std::uint32_t pair_bits(int k) { return input_bit(k) | output_bit(k); }

}  // namespace

MapTerms sequential_terms(const std::vector<int>& order_in, int n) {
  auto order = resolve_order(order_in, n);
  MapTerms t{{1, output_bit(order[n - 1])}};
  std::uint32_t rest = 0;
  for (int j = n - 2; j >= 0; --j) {
    rest |= pair_bits(order[j + 1]);
    t.push_back({-1, rest});
    t.push_back({1, rest | output_bit(order[j])});
  }
  return simplify(t);
}

MapTerms sequential_chain_product(const std::vector<int>& order_in, int n) {
  auto order = resolve_order(order_in, n);
  MapTerms acc{{1, output_bit(order[n - 1])}};
  std::uint32_t rest = 0;
  for (int j = n - 2; j >= 0; --j) {
    rest |= pair_bits(order[j + 1]);
    MapTerms f{{1, 0u}, {-1, rest}, {1, rest | output_bit(order[j])}};
    acc = compose(acc, f);
  }
  return acc;
}

MapTerms general_terms(int n) {
  MapTerms prod = identity_terms();
  std::uint32_t all = 0;
  for (int k = 1; k <= n; ++k) {
    MapTerms f{{1, 0u}, {-1, output_bit(k)}, {1, pair_bits(k)}};
    prod = compose(prod, f);
    all |= pair_bits(k);
  }
  MapTerms t = add(identity_terms(), prod, -1);
  return add(t, MapTerms{{1, all}});
}

std::vector<MapTerms> superposition_terms(int n) {
  if (n != 2) throw ConfigError("n", "the causal-superposition class is implemented for two channel uses");
  return {sequential_terms({1, 2}, 2), sequential_terms({2, 1}, 2)};
}

MapTerms lambda_terms(const StrategyClass& k, int n) {
  switch (k.kind) {
    case StrategyKind::parallel: return parallel_terms(n);
    case StrategyKind::sequential: return sequential_terms(k.order, n);
    case StrategyKind::general_ico: return general_terms(n);
    case StrategyKind::causal_superposition:
      throw std::invalid_argument("lambda_terms: the causal-superposition class has no single projector");
  }
  return {};
}

namespace {

std::vector<int> qubit_dims(long d, int n) {
  int local = static_cast<int>(std::lround(std::pow(static_cast<double>(d), 1.0 / (2 * n))));
  long check = 1;
  for (int k = 0; k < 2 * n; ++k) check *= local;
  if (check != d) throw std::invalid_argument("lambda_apply: dimension is not a 2n-th power");
  return std::vector<int>(2 * n, local);
}

}  // namespace

CMat lambda_apply(const StrategyClass& k, const CMat& x, int n) {
  auto dims = qubit_dims(x.rows(), n);
  return apply_terms(lambda_terms(k, n), x, dims);
}

LabeledOperator lambda_apply(const StrategyClass& k, const LabeledOperator& x) {
  const auto& reg = x.registry();
  const int n = static_cast<int>(reg.size() / 2);
  if (reg.size() % 2 != 0 || !(reg == SpaceRegistry::copies(n, reg[0].dim)))
    throw std::invalid_argument("lambda_apply: operator must live on I1,O1,...,IN,ON");
  return LabeledOperator(reg, apply_terms(lambda_terms(k, n), x.matrix(), reg.dims()));
}

UnitImage unit_image(const MapTerms& terms, std::span<const int> dims, long a, long b) {
  auto strides = detail::strides_of(dims);
  long d = 1;
  for (int x : dims) d *= x;
  std::map<long, double> acc;
  for (const auto& t : terms) {
    if (t.mask == 0) {
      acc[a * d + b] += t.coef;
      continue;
    }
    long oa = detail::masked_offset(a, dims, strides, t.mask);
    long ob = detail::masked_offset(b, dims, strides, t.mask);
    if (oa != ob) continue;
    auto offs = detail::masked_offsets(dims, strides, t.mask);
    const double w = static_cast<double>(t.coef) / static_cast<double>(offs.size());
    for (long o : offs) acc[(a - oa + o) * d + (b - ob + o)] += w;
  }
  UnitImage img;
  for (const auto& [u, c] : acc)
    if (c != 0.0) {
      img.unit.push_back(u);
      img.coef.push_back(c);
    }
  return img;
}

TesterDiagnostics is_valid_tester(const StrategyClass& k, const CMat& xt, int n, double tol) {
  TesterDiagnostics diag;
  const long d = xt.rows();
  auto dims = qubit_dims(d, n);
  long d_out = 1;
  for (int j = 0; j < n; ++j) d_out *= dims[2 * j + 1];
  if (hermiticity_defect(xt) > tol) {
    diag.message = "operator is not Hermitian";
    return diag;
  }
  diag.min_eigenvalue = herm_eig(xt, 1e-6).values.minCoeff();
  diag.trace_error = std::abs(xt.trace().real() - static_cast<double>(d_out));
  if (k.kind == StrategyKind::causal_superposition) {
    auto dec = superposition_decomposition(xt, n);
    diag.decomposition_margin = dec.margin;
    diag.fixed_point_residual = dec.linear_residual;
    diag.valid = dec.margin >= -tol && dec.linear_residual <= tol && diag.trace_error <= tol;
    if (!diag.valid) diag.message = "no decomposition into ordered sequential testers";
    return diag;
  }
  CMat img = apply_terms(lambda_terms(k, n), xt, dims);
  diag.fixed_point_residual = (img - xt).cwiseAbs().maxCoeff();
  diag.valid = diag.min_eigenvalue >= -tol && diag.fixed_point_residual <= tol && diag.trace_error <= tol;
  if (!diag.valid) {
    if (diag.min_eigenvalue < -tol) diag.message = "operator is not positive semidefinite";
    else if (diag.fixed_point_residual > tol) diag.message = "operator is not a fixed point of the class projector";
    else diag.message = "trace differs from the output dimension";
  }
  return diag;
}

}  // namespace globest

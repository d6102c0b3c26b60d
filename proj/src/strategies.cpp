#include "globest/strategies.hpp"

#include <cmath>
#include <random>

#include "globest/channels.hpp"

namespace globest {

namespace {

LabeledOperator wire(const std::string& from, const std::string& to, int dim) {
  CVec v = CVec::Zero(dim * dim);
  for (int i = 0; i < dim; ++i) v(i * dim + i) = 1.0;
  return LabeledOperator(SpaceRegistry({{from, dim}, {to, dim}}), v * v.adjoint());
}

void check_state(const CVec& psi, long expected, const char* field) {
  if (psi.size() != expected)
    throw ConfigError(field, "state has dimension " + std::to_string(psi.size()) + ", expected " + std::to_string(expected));
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError(field, "state is not normalized");
}

std::vector<std::string> strategy_order(int n, const std::vector<std::string>& outputs) {
  std::vector<std::string> order;
  for (int k = 1; k <= n; ++k) {
    order.push_back("I" + std::to_string(k));
    order.push_back("O" + std::to_string(k));
  }
  order.insert(order.end(), outputs.begin(), outputs.end());
  return order;
}

}  // namespace

std::vector<std::string> FixedStrategy::output_names() const {
  std::vector<std::string> out;
  for (const auto& p : x.registry().parts())
    if (!is_input_name(p.name) && !is_output_name(p.name)) out.push_back(p.name);
  return out;
}

CMat FixedStrategy::reduced() const {
  auto names = output_names();
  return partial_trace(x, names).matrix();
}

FixedStrategy parallel_strategy(const CVec& psi, int n, int ancilla_dim) {
  if (n < 1) throw ConfigError("n", "must be positive");
  if (ancilla_dim < 1) throw ConfigError("ancilla_dim", "must be positive");
  check_state(psi, (1L << n) * ancilla_dim, "psi");
  std::vector<Subsystem> parts;
  for (int k = 1; k <= n; ++k) parts.push_back({"I" + std::to_string(k), 2});
  parts.push_back({"A", ancilla_dim});
  LabeledOperator op(SpaceRegistry(parts), psi * psi.adjoint());
  std::vector<std::string> outputs;
  for (int k = 1; k <= n; ++k) {
    op = kron(op, wire("O" + std::to_string(k), "F" + std::to_string(k), 2));
    outputs.push_back("F" + std::to_string(k));
  }
  outputs.push_back("A");
  FixedStrategy s;
  s.x = permute(op, strategy_order(n, outputs));
  s.copies = n;
  s.declared = StrategyClass::parallel();
  s.descriptor = "parallel";
  return s;
}

FixedStrategy sequential_strategy(const CVec& psi, const std::vector<CMat>& controls, int n, int ancilla_dim) {
  if (n < 1) throw ConfigError("n", "must be positive");
  if (ancilla_dim < 1) throw ConfigError("ancilla_dim", "must be positive");
  check_state(psi, 2L * ancilla_dim, "psi");
  if (static_cast<int>(controls.size()) != n - 1) throw ConfigError("controls", "need one control per interlink");
  auto anc = [n](int k) { return k == n ? std::string("A") : "A" + std::to_string(k); };
  LabeledOperator op(SpaceRegistry({{"I1", 2}, {anc(1), ancilla_dim}}), psi * psi.adjoint());
  for (int k = 1; k < n; ++k) {
    const CMat& v = controls[k - 1];
    if (v.rows() != 2 * ancilla_dim || v.cols() != 2 * ancilla_dim) throw ConfigError("controls", "control has the wrong dimension");
    if ((v.adjoint() * v - CMat::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff() > 1e-10)
      throw ConfigError("controls", "control is not unitary");
    SpaceRegistry reg({{"O" + std::to_string(k), 2}, {anc(k), ancilla_dim}, {"I" + std::to_string(k + 1), 2}, {anc(k + 1), ancilla_dim}});
    op = link_product(op, LabeledOperator(reg, choi_from_kraus({v})));
  }
  op = kron(op, wire("O" + std::to_string(n), "F", 2));
  FixedStrategy s;
  s.x = permute(op, strategy_order(n, {"F", "A"}));
  s.copies = n;
  s.declared = StrategyClass::sequential();
  s.descriptor = "sequential";
  return s;
}

FixedStrategy sequential_no_control(const CVec& psi, int n, int ancilla_dim) {
  std::vector<CMat> id(n - 1, CMat::Identity(2 * ancilla_dim, 2 * ancilla_dim));
  FixedStrategy s = sequential_strategy(psi, id, n, ancilla_dim);
  s.descriptor = "sequential without control";
  return s;
}

CVec ghz_state(int n) {
  CVec v = CVec::Zero(1L << n);
  v(0) = v((1L << n) - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

CVec plus_state() {
  CVec v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

CVec candidate_state() {
  // basis order s1 s2 a1 a2
  CVec v = CVec::Zero(16);
  v(0b0000) = std::sqrt(0.3);
  v(0b0101) = std::sqrt(0.2);
  v(0b1010) = std::sqrt(0.2);
  v(0b1111) = std::sqrt(0.3);
  return v;
}

CVec random_state(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CVec v(dim);
  for (int i = 0; i < dim; ++i) {
    double re = nd(rng);
    double im = nd(rng);
    v(i) = cd(re, im);
  }
  return v / v.norm();
}

LabeledOperator apply_strategy(const FixedStrategy& s, const CMat& c) {
  SpaceRegistry reg = SpaceRegistry::copies(s.copies);
  return link_product(s.x, LabeledOperator(reg, c));
}

InfoGain info_gain_direct(const FixedStrategy& s, const AveragedData& avg) {
  if (avg.copies != s.copies) throw std::invalid_argument("info_gain_direct: strategy and data use different copy counts");
  InfoGain g;
  g.rho = hermitian_part(apply_strategy(s, avg.cbar).matrix());
  g.trho = hermitian_part(apply_strategy(s, avg.tcbar).matrix());
  auto sld = solve_sld(g.rho, g.trho);
  g.s = sld.s;
  g.sld_residual = sld.residual;
  g.j = (g.rho * g.s * g.s).trace().real();
  return g;
}

IteDiagnostics verify_ite(const AveragedData& avg, double step, double tol) {
  IteDiagnostics r;
  r.tol = tol;
  CMat plus = imaginary_time_evolve(avg.cbar, avg.h, step);
  CMat minus = imaginary_time_evolve(avg.cbar, avg.h, -step);
  CMat fd = (plus - minus) / (2 * step);
  r.operator_defect = (fd - avg.tcbar).cwiseAbs().maxCoeff();
  r.rho_defect = (imaginary_time_evolve(avg.cbar, avg.h, 0.0) - avg.cbar).cwiseAbs().maxCoeff();
  r.trace_at_tenth = imaginary_time_evolve(avg.cbar, avg.h, 0.1).trace().real() / avg.cbar.trace().real();
  r.ok = r.operator_defect < tol && r.rho_defect < tol;
  return r;
}

IteDiagnostics verify_ite(const FixedStrategy& s, const AveragedData& avg, double step, double tol) {
  IteDiagnostics r = verify_ite(avg, step, tol);
  CMat rho = apply_strategy(s, avg.cbar).matrix();
  CMat trho = apply_strategy(s, avg.tcbar).matrix();
  CMat plus = apply_strategy(s, imaginary_time_evolve(avg.cbar, avg.h, step)).matrix();
  CMat minus = apply_strategy(s, imaginary_time_evolve(avg.cbar, avg.h, -step)).matrix();
  r.state_defect = ((plus - minus) / (2 * step) - trho).cwiseAbs().maxCoeff();
  r.rho_defect = (apply_strategy(s, imaginary_time_evolve(avg.cbar, avg.h, 0.0)).matrix() - rho).cwiseAbs().maxCoeff();
  r.trace_at_tenth = apply_strategy(s, imaginary_time_evolve(avg.cbar, avg.h, 0.1)).matrix().trace().real();
  r.ok = r.operator_defect < tol && r.state_defect < tol && r.rho_defect < tol;
  return r;
}

}  // namespace globest

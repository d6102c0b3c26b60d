#include "globest/priors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "globest/kernels.hpp"

namespace globest {

namespace {

constexpr double kPi = std::numbers::pi;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double x, double mu, double delta) {
  double z = (x - mu) / delta;
  return std::exp(-0.5 * z * z) / (delta * std::sqrt(2.0 * kPi));
}

double truncated_mass(double lo, double hi, double mu, double delta) {
  return normal_cdf((hi - mu) / delta) - normal_cdf((lo - mu) / delta);
}

}  // namespace

Prior Prior::uniform(double lo, double hi) {
  Prior p;
  p.family = Family::uniform;
  p.lo = lo;
  p.hi = hi;
  return p;
}

Prior Prior::gaussian(double mu, double delta) {
  Prior p;
  p.family = Family::gaussian;
  p.mu = mu;
  p.delta = delta;
  return p;
}

Prior Prior::mixture(std::vector<double> weights, std::vector<double> mus, std::vector<double> deltas) {
  Prior p;
  p.family = Family::gaussian_mixture;
  p.weights = std::move(weights);
  p.mus = std::move(mus);
  p.deltas = std::move(deltas);
  return p;
}

Prior Prior::standard_mixture(double w) { return mixture({w, 1.0 - w}, {-kPi / 2, kPi / 2}, {1.0, 2.0}); }

Prior Prior::beta(double a, double b) {
  Prior p;
  p.family = Family::beta;
  p.a = a;
  p.b = b;
  return p;
}

std::string Prior::family_name() const {
  switch (family) {
    case Family::uniform: return "uniform";
    case Family::gaussian: return "gaussian";
    case Family::gaussian_mixture: return "gaussian_mixture";
    case Family::beta: return "beta";
  }
  return "";
}

void Prior::validate() const {
  if (!(hi > lo)) throw ConfigError("support", "upper end must exceed lower end");
  if (nodes < 2) throw ConfigError("nodes", "need at least two quadrature nodes");
  switch (family) {
    case Family::uniform: break;
    case Family::gaussian:
      if (!(delta > 0)) throw ConfigError("delta", "must be positive");
      break;
    case Family::gaussian_mixture: {
      if (weights.empty() || weights.size() != mus.size() || weights.size() != deltas.size())
        throw ConfigError("weights", "mixture needs matching weights, mus and deltas");
      double s = 0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0) throw ConfigError("weights", "must be non-negative");
        if (!(deltas[i] > 0)) throw ConfigError("deltas", "must be positive");
        s += weights[i];
      }
      if (!(s > 0)) throw ConfigError("weights", "must not all vanish");
      break;
    }
    case Family::beta:
      if (!(a > 0)) throw ConfigError("a", "must be positive");
      if (!(b > 0)) throw ConfigError("b", "must be positive");
      break;
  }
}

Support prior_support(const Prior& p) {
  p.validate();
  switch (p.family) {
    case Prior::Family::gaussian: return {std::max(p.lo, p.mu - 10 * p.delta), std::min(p.hi, p.mu + 10 * p.delta)};
    case Prior::Family::gaussian_mixture: {
      double lo = p.hi, hi = p.lo;
      for (std::size_t i = 0; i < p.mus.size(); ++i) {
        lo = std::min(lo, p.mus[i] - 10 * p.deltas[i]);
        hi = std::max(hi, p.mus[i] + 10 * p.deltas[i]);
      }
      return {std::max(p.lo, lo), std::min(p.hi, hi)};
    }
    default: return {p.lo, p.hi};
  }
}

double prior_density_untruncated(const Prior& p, double theta) {
  switch (p.family) {
    case Prior::Family::gaussian: return normal_pdf(theta, p.mu, p.delta);
    case Prior::Family::gaussian_mixture: {
      double s = 0, wsum = 0;
      for (std::size_t i = 0; i < p.mus.size(); ++i) {
        s += p.weights[i] * normal_pdf(theta, p.mus[i], p.deltas[i]);
        wsum += p.weights[i];
      }
      return s / wsum;
    }
    default: return prior_pdf(p, theta);
  }
}

double prior_pdf(const Prior& p, double theta) {
  Support s = prior_support(p);
  if (theta < s.lo || theta > s.hi) throw std::invalid_argument("prior_pdf: theta outside the prior support");
  switch (p.family) {
    case Prior::Family::uniform: return 1.0 / (s.hi - s.lo);
    case Prior::Family::gaussian: return normal_pdf(theta, p.mu, p.delta) / truncated_mass(s.lo, s.hi, p.mu, p.delta);
    case Prior::Family::gaussian_mixture: {
      double num = 0, mass = 0;
      for (std::size_t i = 0; i < p.mus.size(); ++i) {
        num += p.weights[i] * normal_pdf(theta, p.mus[i], p.deltas[i]);
        mass += p.weights[i] * truncated_mass(s.lo, s.hi, p.mus[i], p.deltas[i]);
      }
      return num / mass;
    }
    case Prior::Family::beta: {
      double u = (theta - s.lo) / (s.hi - s.lo);
      return std::pow(u, p.a - 1) * std::pow(1 - u, p.b - 1) / (std::beta(p.a, p.b) * (s.hi - s.lo));
    }
  }
  return 0.0;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    // recompute derivative at the converged node
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& x, std::vector<double>& w) {
  if (!(alpha > -1 && beta > -1)) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag(k) = (beta - alpha) / (ab + 2.0);
    } else {
      double s = 2.0 * k + ab;
      diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    double s = 2.0 * k + ab;
    double v;
    if (k == 1) {
      v = 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
    } else {
      v = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(k - 1) = std::sqrt(v);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  const double mu0 = std::pow(2.0, ab + 1) * std::tgamma(alpha + 1) * std::tgamma(beta + 1) / std::tgamma(ab + 2);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

Quadrature prior_quadrature(const Prior& p, int nodes) {
  Support s = prior_support(p);
  const double half = (s.hi - s.lo) / 2, mid = (s.hi + s.lo) / 2;
  std::vector<double> x, w;
  Quadrature q;
  if (p.family == Prior::Family::beta) {
    gauss_jacobi(nodes, p.b - 1, p.a - 1, x, w);
    double tot = 0;
    for (double v : w) tot += v;
    for (int i = 0; i < nodes; ++i) {
      q.theta.push_back(mid + half * x[i]);
      q.weight.push_back(w[i] / tot);
    }
    return q;
  }
  gauss_legendre(nodes, x, w);
  for (int i = 0; i < nodes; ++i) {
    double t = mid + half * x[i];
    q.theta.push_back(t);
    q.weight.push_back(half * w[i] * prior_pdf(p, t));
  }
  return q;
}

CMat solve_H(const CMat& cbar, const CMat& tcbar, double rank_tol, double* residual) {
  auto sld = solve_sld(cbar, -tcbar, rank_tol);
  CMat h = sld.s / 2.0;
  h = hermitian_part(h);
  if (residual) *residual = (tcbar + h * cbar + cbar * h).norm();
  return h;
}

CMat ensemble_factor(const CMat& cbar, double rank_tol) {
  auto eig = herm_eig(cbar);
  const double cut = rank_tol * std::max(eig.values(0), 0.0);
  int q = 0;
  while (q < eig.values.size() && eig.values(q) > cut) ++q;
  if (q == 0) throw std::invalid_argument("ensemble_factor: zero operator");
  CMat phi(cbar.rows(), q);
  for (int i = 0; i < q; ++i) phi.col(i) = std::sqrt(eig.values(i)) * eig.vectors.col(i);
  return phi;
}

CMat imaginary_time_evolve(const CMat& cbar, const CMat& h, double tau) {
  CMat e = (CMat(-tau * h)).exp();
  return e * cbar * e.adjoint();
}

AveragedData average_choi(const ChannelSpec& ch, int copies, const Prior& p, const AverageOptions& opt) {
  if (copies < 1) throw ConfigError("n", "number of channel uses must be positive");
  p.validate();
  auto gen = [&](double t) {
    CMat e = kraus_to_choi(ch, t).matrix();
    CMat acc = e;
    for (int k = 1; k < copies; ++k) acc = kron(acc, e);
    return acc;
  };
  Quadrature q = prior_quadrature(p, p.nodes);
  auto mom = kernels::moments_parallel(gen, q.theta, q.weight);
  AveragedData out;
  out.copies = copies;
  out.registry = SpaceRegistry::copies(copies, ch.input_dim());
  if (ch.input_dim() != ch.output_dim()) {
    std::vector<Subsystem> parts;
    for (int k = 1; k <= copies; ++k) {
      parts.push_back({"I" + std::to_string(k), ch.input_dim()});
      parts.push_back({"O" + std::to_string(k), ch.output_dim()});
    }
    out.registry = SpaceRegistry(parts);
  }
  out.cbar = hermitian_part(mom.c);
  out.tcbar = hermitian_part(mom.tc);
  out.m2 = mom.m2;
  out.mean = mom.m1;
  if (opt.check_doubling) {
    Quadrature q2 = prior_quadrature(p, 2 * p.nodes);
    auto mom2 = kernels::moments_parallel(gen, q2.theta, q2.weight);
    double change = std::max((mom2.c - mom.c).cwiseAbs().maxCoeff(), (mom2.tc - mom.tc).cwiseAbs().maxCoeff());
    change = std::max(change, std::abs(mom2.m2 - mom.m2));
    out.quadrature_change = change;
    if (change > opt.doubling_tol)
      throw std::runtime_error("quadrature did not converge: node doubling changed averages by " + std::to_string(change));
  }
  out.h = solve_H(out.cbar, out.tcbar, opt.rank_tol, &out.h_residual);
  out.phi = ensemble_factor(out.cbar, opt.rank_tol);
  out.q = static_cast<int>(out.phi.cols());
  return out;
}

json prior_to_json(const Prior& p) {
  json j;
  j["family"] = p.family_name();
  j["support"] = {p.lo, p.hi};
  j["nodes"] = p.nodes;
  switch (p.family) {
    case Prior::Family::uniform: break;
    case Prior::Family::gaussian:
      j["mu"] = p.mu;
      j["delta"] = p.delta;
      break;
    case Prior::Family::gaussian_mixture:
      j["weights"] = p.weights;
      j["mus"] = p.mus;
      j["deltas"] = p.deltas;
      break;
    case Prior::Family::beta:
      j["a"] = p.a;
      j["b"] = p.b;
      break;
  }
  return j;
}

namespace {

double num(const json& j, const std::string& k) {
  if (!j.contains(k) || !j[k].is_number()) throw ConfigError(k, "missing numeric prior field");
  return j[k].get<double>();
}

std::vector<double> nums(const json& j, const std::string& k) {
  if (!j.contains(k) || !j[k].is_array()) throw ConfigError(k, "expected a list of numbers");
  std::vector<double> v;
  for (const auto& e : j[k]) {
    if (!e.is_number()) throw ConfigError(k, "expected a list of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

Prior prior_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("prior", "expected a JSON object");
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("family", "missing prior family");
  const std::string fam = j["family"].get<std::string>();
  Prior p;
  if (fam == "uniform") {
    p = Prior::uniform();
  } else if (fam == "gaussian") {
    p = Prior::gaussian(num(j, "mu"), num(j, "delta"));
  } else if (fam == "gaussian_mixture") {
    if (j.contains("w")) {
      p = Prior::standard_mixture(num(j, "w"));
    } else {
      p = Prior::mixture(nums(j, "weights"), nums(j, "mus"), nums(j, "deltas"));
    }
  } else if (fam == "beta") {
    p = Prior::beta(num(j, "a"), j.contains("b") ? num(j, "b") : 2.0);
  } else {
    throw ConfigError("family", "unknown prior family '" + fam + "'");
  }
  if (j.contains("support")) {
    auto s = nums(j, "support");
    if (s.size() != 2) throw ConfigError("support", "expected [lo, hi]");
    p.lo = s[0];
    p.hi = s[1];
  }
  if (j.contains("nodes")) {
    if (!j["nodes"].is_number_integer()) throw ConfigError("nodes", "expected an integer");
    p.nodes = j["nodes"].get<int>();
  }
  p.validate();
  return p;
}

}  // namespace globest

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "globest/channels.hpp"
#include "globest/json_io.hpp"

namespace globest {

struct Prior {
  enum class Family { uniform, gaussian, gaussian_mixture, beta };

  Family family = Family::uniform;
  double lo = -3.14159265358979323846;  // window / support
  double hi = 3.14159265358979323846;
  double mu = 0.0, delta = 1.0;          // gaussian
  std::vector<double> weights, mus, deltas;  // gaussian_mixture
  double a = 1.0, b = 2.0;               // beta on [lo, hi)
  int nodes = 201;

  static Prior uniform(double lo = -3.14159265358979323846, double hi = 3.14159265358979323846);
  static Prior gaussian(double mu, double delta);
  static Prior mixture(std::vector<double> weights, std::vector<double> mus, std::vector<double> deltas);
  // Two-component mixture with fixed widths 1, 2 and means -pi/2, +pi/2.
  static Prior standard_mixture(double w);
  static Prior beta(double a, double b = 2.0);

  std::string family_name() const;
  void validate() const;
};

struct Support {
  double lo, hi;
};

Support prior_support(const Prior& p);
// Density normalized on the support; throws outside it.
double prior_pdf(const Prior& p, double theta);
// Gaussian-family density before truncation to the support.
double prior_density_untruncated(const Prior& p, double theta);

struct Quadrature {
  std::vector<double> theta;
  std::vector<double> weight;  // already multiplied by the density
};

// Nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
// Nodes/weights for weight (1-x)^alpha (1+x)^beta on [-1, 1].
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& x, std::vector<double>& w);

Quadrature prior_quadrature(const Prior& p, int nodes);

struct AveragedData {
  int copies = 1;
  SpaceRegistry registry;
  CMat cbar;     // int p C_theta
  CMat tcbar;    // int p theta C_theta
  double m2 = 0; // int p theta^2
  double mean = 0;
  CMat h;        // theta C + {H, C} = 0 on the support of C
  CMat phi;      // C = phi phi^dagger, columns sqrt(lambda_i) v_i
  int q = 0;
  double quadrature_change = 0;  // entrywise change under node doubling
  double h_residual = 0;
};

struct AverageOptions {
  bool check_doubling = true;
  double doubling_tol = 1e-8;
  double rank_tol = 1e-10;
};

AveragedData average_choi(const ChannelSpec& ch, int copies, const Prior& p, const AverageOptions& opt = {});

// theta C + H C + C H = 0 restricted to the support of C.
CMat solve_H(const CMat& cbar, const CMat& tcbar, double rank_tol = 1e-10, double* residual = nullptr);
CMat ensemble_factor(const CMat& cbar, double rank_tol = 1e-10);

// C(tau) = exp(-H tau) C exp(-H tau)
CMat imaginary_time_evolve(const CMat& cbar, const CMat& h, double tau);

json prior_to_json(const Prior& p);
Prior prior_from_json(const json& j);

}  // namespace globest

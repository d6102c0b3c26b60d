#pragma once

#include <string>

#include "globest/rational.hpp"
#include "globest/sdp.hpp"

namespace globest {

// Rationalized problem data; certified bounds refer to this instance.
struct ExactData {
  int n = 1;
  std::vector<int> dims;
  long d = 0, d_in = 0, d_out = 0;
  int q = 0;
  int data_digits = 10;
  QMat h, phi;
  QMat phis;       // conj(phi), d x q
  QMat phis_left;  // left inverse of phis, q x d
  QMat a;          // conj(h) conj(phi), d x q
  std::string data_hash;
};

// Throws CertificationFailure when the rationalized factor loses column rank.
ExactData make_exact_data(const SdpData& data, int data_digits = 10);

struct CertifyOptions {
  int digits = 6;      // truncation of numeric witnesses
  int grid_bits = 40;  // blend parameters live on the grid 2^-grid_bits
};

struct LowerCertificate {
  StrategyClass k;
  mpq_class bound;
  mpq_class eps, eps1, eps2;  // eps1/eps2: per-order blends, causal superposition only
  QMat xt, xt1, xt2, b, c;
  int psd_tests = 0;
};

struct UpperCertificate {
  StrategyClass k;
  mpq_class lambda;
  QMat yt, yt1, yt2, h;
  int psd_tests = 0;
};

LowerCertificate certify_lower(const StrategyClass& k, const PrimalWitness& w, const ExactData& ed,
                               const CertifyOptions& opt = {});
UpperCertificate certify_upper(const StrategyClass& k, const DualWitness& w, const ExactData& ed,
                               const CertifyOptions& opt = {});

// Independent exact re-checks of every constraint; they use the rational LDL route.
struct ExactCheck {
  bool ok = false;
  std::string message;
};
ExactCheck verify_lower(const LowerCertificate& c, const ExactData& ed);
ExactCheck verify_upper(const UpperCertificate& c, const ExactData& ed);

// Exact objective -tr C - 4 Re tr(conj(H) conj(Phi) B).
mpq_class exact_primal_objective(const QMat& b, const QMat& c, const ExactData& ed);

struct CertifiedInterval {
  StrategyClass k;
  mpq_class lower, upper;
  mpq_class eps_lower, eps1, eps2;
  int digits = 6;
  int data_digits = 10;
  int grid_bits = 40;
  std::string data_hash;
};

CertifiedInterval make_interval(const LowerCertificate& lo, const UpperCertificate& up, const ExactData& ed,
                                const CertifyOptions& opt);
json interval_to_json(const CertifiedInterval& c);
CertifiedInterval interval_from_json(const json& j);

}  // namespace globest

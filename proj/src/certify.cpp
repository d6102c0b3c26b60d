#include "globest/certify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace globest {

namespace {

QMat scale(const QMat& m, const mpq_class& s) { return QComplex(s) * m; }

mpq_class grid_point(long long j, int bits) {
  mpz_class num;
  mpz_set_si(num.get_mpz_t(), static_cast<long>(j));
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(bits));
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

// Smallest integer j in [lo, hi] with pass(j), for a monotone predicate, starting near guess.
long long smallest_passing(const std::function<bool(long long)>& pass, long long guess, long long lo, long long hi,
                           const char* what) {
  guess = std::clamp(guess, lo, hi);
  long long good, bad;
  if (pass(guess)) {
    good = guess;
    long long step = 1;
    for (;;) {
      if (good == lo) return lo;
      long long cand = std::max(lo, good - step);
      if (pass(cand)) {
        good = cand;
        step *= 2;
      } else {
        bad = cand;
        break;
      }
    }
  } else {
    bad = guess;
    long long step = 1;
    for (;;) {
      if (bad == hi) throw CertificationFailure(std::string(what) + ": no feasible blend on the search interval");
      long long cand = std::min(hi, bad + step);
      if (pass(cand)) {
        good = cand;
        break;
      }
      bad = cand;
      step *= 2;
    }
  }
  while (good - bad > 1) {
    long long mid = bad + (good - bad) / 2;
    if (pass(mid)) good = mid;
    else bad = mid;
  }
  return good;
}

long long ceil_to_grid(double x, int bits) {
  const double s = std::ldexp(1.0, bits);
  return static_cast<long long>(std::ceil(x * s));
}

// B <- Herm(B Phi*) L + B (I - Phi* L) makes B Phi* exactly Hermitian.
QMat fix_b(const QMat& b, const ExactData& ed) {
  QMat bp = b * ed.phis;
  QMat herm = hermitize(bp);
  QMat proj = QMat::identity(ed.d) - ed.phis * ed.phis_left;
  return herm * ed.phis_left + b * proj;
}

QMat primal_block(const QMat& xt, const QMat& b, const QMat& c) {
  const long d = xt.rows(), q = c.rows();
  QMat z(d + q, d + q);
  z.set_block(0, 0, xt);
  z.set_block(d, 0, b);
  z.set_block(0, d, b.adjoint());
  z.set_block(d, d, c);
  return z;
}

// (1 - e) Z0 + e diag(I / d_in, I_q)
QMat blend_primal(const QMat& z0, long d, long q, long d_in, const mpq_class& e) {
  QMat z = scale(z0, 1 - e);
  const mpq_class top = e / d_in;
  for (long i = 0; i < d; ++i) z(i, i).re += top;
  for (long i = d; i < d + q; ++i) z(i, i).re += e;
  return z;
}

double float_blend_guess(const CMat& z0, const RVec& target_diag) {
  // smallest e with (1 - e) Z0 + e D >= 0, D diagonal positive
  RVec s = target_diag.cwiseSqrt().cwiseInverse();
  CMat w = s.asDiagonal() * z0 * s.asDiagonal();
  double lmin = herm_eig(hermitian_part(w), 1e-6).values.minCoeff();
  if (lmin >= 0) return 0.0;
  double t = -lmin;
  return t / (1 + t);
}

QMat dual_residual(const QMat& h, const ExactData& ed) {
  QMat k = ed.a - QComplex(mpq_class(0), mpq_class(1)) * (ed.phis * h);
  return scale(k * k.adjoint(), 4);
}

QMat map_apply(const MapTerms& t, const QMat& x, const ExactData& ed) { return apply_terms(t, x, ed.dims); }

bool is_zero(const QMat& m) {
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) return false;
  return true;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

ExactData make_exact_data(const SdpData& data, int data_digits) {
  ExactData ed;
  ed.n = data.n;
  ed.dims = data.dims;
  ed.d = data.d;
  ed.d_in = data.d_in;
  ed.d_out = data.d_out;
  ed.q = data.q;
  ed.data_digits = data_digits;
  ed.h = rationalize(data.h, data_digits);
  ed.phi = rationalize(data.phi, data_digits);
  ed.phis = ed.phi.conjugate();
  ed.a = ed.h.conjugate() * ed.phis;
  try {
    ed.phis_left = left_inverse(ed.phis);
  } catch (const std::domain_error&) {
    throw CertificationFailure("rationalized ensemble factor has dependent columns");
  }
  ed.data_hash = hex64(fnv1a({&ed.h, &ed.phi}));
  return ed;
}

mpq_class exact_primal_objective(const QMat& b, const QMat& c, const ExactData& ed) {
  mpq_class tr_ab = 0;
  for (long i = 0; i < ed.a.rows(); ++i)
    for (long j = 0; j < ed.a.cols(); ++j) tr_ab += (ed.a(i, j) * b(j, i)).re;
  return -c.trace().re - 4 * tr_ab;
}

LowerCertificate certify_lower(const StrategyClass& k, const PrimalWitness& w, const ExactData& ed,
                               const CertifyOptions& opt) {
  LowerCertificate out;
  out.k = k;
  const long d = ed.d, q = ed.q;
  const long long one = 1LL << opt.grid_bits;
  QMat c = hermitize(rationalize(w.c, opt.digits));
  QMat b = fix_b(rationalize(w.b, opt.digits), ed);
  RVec target(d + q);
  target.head(d).setConstant(1.0 / static_cast<double>(ed.d_in));
  target.tail(q).setConstant(1.0);

  QMat xt;
  if (k.kind == StrategyKind::causal_superposition) {
    auto terms = superposition_terms(ed.n);
    QMat x1 = map_apply(terms[0], hermitize(rationalize(w.xt1, opt.digits)), ed);
    QMat x2 = map_apply(terms[1], hermitize(rationalize(w.xt2, opt.digits)), ed);
    const mpq_class tsum = x1.trace().re + x2.trace().re;
    if (sgn(tsum) <= 0) throw CertificationFailure("tester trace is not positive");
    const mpq_class s = mpq_class(ed.d_out) / tsum;
    x1 = scale(x1, s);
    x2 = scale(x2, s);
    QMat* blocks[2] = {&x1, &x2};
    mpq_class* eps_out[2] = {&out.eps1, &out.eps2};
    for (int r = 0; r < 2; ++r) {
      QMat& x = *blocks[r];
      const mpq_class tk = x.trace().re;
      if (sgn(tk) <= 0) throw CertificationFailure("a causal-order component has non-positive trace");
      const mpq_class unit = tk / d;
      const double tf = unit.get_d();
      double guess = float_blend_guess(to_cmat(x), RVec::Constant(d, tf));
      auto pass = [&](long long j) {
        ++out.psd_tests;
        const mpq_class e = grid_point(j, opt.grid_bits);
        QMat y = scale(x, 1 - e);
        for (long i = 0; i < d; ++i) y(i, i).re += e * unit;
        return exact_psd(y);
      };
      long long j = smallest_passing(pass, ceil_to_grid(guess, opt.grid_bits), 0, one, "order blend");
      const mpq_class e = grid_point(j, opt.grid_bits);
      QMat y = scale(x, 1 - e);
      for (long i = 0; i < d; ++i) y(i, i).re += e * unit;
      x = std::move(y);
      *eps_out[r] = e;
    }
    xt = x1 + x2;
    QMat z0 = primal_block(xt, b, c);
    double guess = float_blend_guess(to_cmat(z0), target);
    auto pass = [&](long long j) {
      ++out.psd_tests;
      return exact_psd(blend_primal(z0, d, q, ed.d_in, grid_point(j, opt.grid_bits)));
    };
    long long j = smallest_passing(pass, ceil_to_grid(guess, opt.grid_bits), 0, one, "tester blend");
    out.eps = grid_point(j, opt.grid_bits);
    const mpq_class half = out.eps / (2 * ed.d_in);
    out.xt1 = scale(x1, 1 - out.eps);
    out.xt2 = scale(x2, 1 - out.eps);
    for (long i = 0; i < d; ++i) {
      out.xt1(i, i).re += half;
      out.xt2(i, i).re += half;
    }
    out.xt = out.xt1 + out.xt2;
  } else {
    xt = map_apply(lambda_terms(k, ed.n), hermitize(rationalize(w.xt, opt.digits)), ed);
    const mpq_class t = xt.trace().re;
    if (sgn(t) <= 0) throw CertificationFailure("tester trace is not positive");
    xt = scale(xt, mpq_class(ed.d_out) / t);
    QMat z0 = primal_block(xt, b, c);
    double guess = float_blend_guess(to_cmat(z0), target);
    auto pass = [&](long long j) {
      ++out.psd_tests;
      return exact_psd(blend_primal(z0, d, q, ed.d_in, grid_point(j, opt.grid_bits)));
    };
    long long j = smallest_passing(pass, ceil_to_grid(guess, opt.grid_bits), 0, one, "tester blend");
    out.eps = grid_point(j, opt.grid_bits);
    out.xt = scale(xt, 1 - out.eps);
    for (long i = 0; i < d; ++i) out.xt(i, i).re += out.eps / ed.d_in;
  }
  out.b = scale(b, 1 - out.eps);
  out.c = scale(c, 1 - out.eps);
  for (long i = 0; i < q; ++i) out.c(i, i).re += out.eps;
  out.bound = exact_primal_objective(out.b, out.c, ed);
  return out;
}

UpperCertificate certify_upper(const StrategyClass& k, const DualWitness& w, const ExactData& ed,
                               const CertifyOptions& opt) {
  UpperCertificate out;
  out.k = k;
  const long d = ed.d;
  out.h = hermitize(rationalize(w.h, opt.digits));
  const QMat omega = dual_residual(out.h, ed);
  std::vector<QMat> ys;
  if (k.kind == StrategyKind::causal_superposition) {
    auto terms = superposition_terms(ed.n);
    QMat y1 = hermitize(rationalize(w.yt1, opt.digits));
    QMat y2 = hermitize(rationalize(w.yt2, opt.digits));
    out.yt1 = y1 - map_apply(terms[0], y1, ed);
    out.yt2 = y2 - map_apply(terms[1], y2, ed);
    ys = {out.yt1, out.yt2};
  } else {
    QMat y = hermitize(rationalize(w.yt, opt.digits));
    out.yt = y - map_apply(lambda_terms(k, ed.n), y, ed);
    ys = {out.yt};
  }
  // lambda I / d_O + Y - Omega >= 0 for every block (Schur complement of the I_q corner).
  std::vector<QMat> m0;
  double guess = -std::numeric_limits<double>::infinity();
  for (const auto& y : ys) {
    m0.push_back(y - omega);
    double lmax = herm_eig(hermitian_part(to_cmat(omega - y)), 1e-6).values(0);
    guess = std::max(guess, lmax * static_cast<double>(ed.d_out));
  }
  auto pass = [&](long long j) {
    const mpq_class lam = grid_point(j, opt.grid_bits) / ed.d_out;
    for (const auto& m : m0) {
      ++out.psd_tests;
      QMat s = m;
      for (long i = 0; i < d; ++i) s(i, i).re += lam;
      if (!exact_psd(s)) return false;
    }
    return true;
  };
  const long long lim = 1LL << 61;
  long long j = smallest_passing(pass, ceil_to_grid(guess, opt.grid_bits), -lim, lim, "dual level");
  out.lambda = grid_point(j, opt.grid_bits);
  return out;
}

ExactCheck verify_lower(const LowerCertificate& c, const ExactData& ed) {
  ExactCheck r;
  const long d = ed.d;
  if (c.xt.rows() != d || c.b.rows() != ed.q || c.b.cols() != d || c.c.rows() != ed.q) {
    r.message = "witness has the wrong shape";
    return r;
  }
  if (!is_hermitian(c.xt) || !is_hermitian(c.c)) {
    r.message = "witness blocks are not Hermitian";
    return r;
  }
  if (c.k.kind == StrategyKind::causal_superposition) {
    auto terms = superposition_terms(ed.n);
    if (!(map_apply(terms[0], c.xt1, ed) == c.xt1) || !(map_apply(terms[1], c.xt2, ed) == c.xt2)) {
      r.message = "order components are not fixed points";
      return r;
    }
    if (!(c.xt1 + c.xt2 == c.xt)) {
      r.message = "order components do not sum to the tester";
      return r;
    }
    if (!exact_psd_ldl(c.xt1) || !exact_psd_ldl(c.xt2)) {
      r.message = "an order component is not positive semidefinite";
      return r;
    }
  } else if (!(map_apply(lambda_terms(c.k, ed.n), c.xt, ed) == c.xt)) {
    r.message = "tester is not a fixed point of the class projection";
    return r;
  }
  if (c.xt.trace() != QComplex(mpq_class(ed.d_out))) {
    r.message = "tester trace differs from the output dimension";
    return r;
  }
  if (!is_hermitian(c.b * ed.phis)) {
    r.message = "B Phi* is not Hermitian";
    return r;
  }
  if (!exact_psd_ldl(primal_block(c.xt, c.b, c.c))) {
    r.message = "primal block is not positive semidefinite";
    return r;
  }
  if (exact_primal_objective(c.b, c.c, ed) != c.bound) {
    r.message = "objective does not match the bound";
    return r;
  }
  r.ok = true;
  return r;
}

ExactCheck verify_upper(const UpperCertificate& c, const ExactData& ed) {
  ExactCheck r;
  const long d = ed.d, q = ed.q;
  std::vector<std::pair<const QMat*, MapTerms>> parts;
  if (c.k.kind == StrategyKind::causal_superposition) {
    auto terms = superposition_terms(ed.n);
    parts = {{&c.yt1, terms[0]}, {&c.yt2, terms[1]}};
  } else {
    parts = {{&c.yt, lambda_terms(c.k, ed.n)}};
  }
  if (!is_hermitian(c.h)) {
    r.message = "h is not Hermitian";
    return r;
  }
  QMat kk = ed.a - QComplex(mpq_class(0), mpq_class(1)) * (ed.phis * c.h);
  const mpq_class lam = c.lambda / ed.d_out;
  for (const auto& [y, terms] : parts) {
    if (y->rows() != d || !is_hermitian(*y)) {
      r.message = "dual tester block has the wrong shape or is not Hermitian";
      return r;
    }
    if (!is_zero(map_apply(terms, *y, ed))) {
      r.message = "dual block is not annihilated by the class projection";
      return r;
    }
    QMat blk(d + q, d + q);
    QMat tl = *y;
    for (long i = 0; i < d; ++i) tl(i, i).re += lam;
    blk.set_block(0, 0, tl);
    QMat k2 = scale(kk, 2);
    blk.set_block(0, d, k2);
    blk.set_block(d, 0, k2.adjoint());
    blk.set_block(d, d, QMat::identity(q));
    if (!exact_psd_ldl(blk)) {
      r.message = "dual block is not positive semidefinite";
      return r;
    }
  }
  r.ok = true;
  return r;
}

CertifiedInterval make_interval(const LowerCertificate& lo, const UpperCertificate& up, const ExactData& ed,
                                const CertifyOptions& opt) {
  CertifiedInterval c;
  c.k = lo.k;
  c.lower = lo.bound;
  c.upper = up.lambda;
  c.eps_lower = lo.eps;
  c.eps1 = lo.eps1;
  c.eps2 = lo.eps2;
  c.digits = opt.digits;
  c.data_digits = ed.data_digits;
  c.grid_bits = opt.grid_bits;
  c.data_hash = ed.data_hash;
  return c;
}

json interval_to_json(const CertifiedInterval& c) {
  json j;
  j["class"] = c.k.roman();
  if (c.k.kind == StrategyKind::sequential && !c.k.order.empty()) j["order"] = c.k.order;
  j["lower"] = to_string(c.lower);
  j["upper"] = to_string(c.upper);
  j["lower_approx"] = c.lower.get_d();
  j["upper_approx"] = c.upper.get_d();
  j["blend_eps"] = to_string(c.eps_lower);
  if (c.k.kind == StrategyKind::causal_superposition) {
    j["blend_eps1"] = to_string(c.eps1);
    j["blend_eps2"] = to_string(c.eps2);
  }
  j["digits"] = c.digits;
  j["data_digits"] = c.data_digits;
  j["grid_bits"] = c.grid_bits;
  j["data_hash"] = c.data_hash;
  return j;
}

CertifiedInterval interval_from_json(const json& j) {
  CertifiedInterval c;
  try {
    c.k = StrategyClass::parse(j.at("class").get<std::string>());
    if (j.contains("order")) c.k.order = j.at("order").get<std::vector<int>>();
    c.lower = rational_from_string(j.at("lower").get<std::string>());
    c.upper = rational_from_string(j.at("upper").get<std::string>());
    c.eps_lower = rational_from_string(j.at("blend_eps").get<std::string>());
    if (j.contains("blend_eps1")) c.eps1 = rational_from_string(j.at("blend_eps1").get<std::string>());
    if (j.contains("blend_eps2")) c.eps2 = rational_from_string(j.at("blend_eps2").get<std::string>());
    c.digits = j.at("digits").get<int>();
    c.data_digits = j.at("data_digits").get<int>();
    c.grid_bits = j.value("grid_bits", 40);
    c.data_hash = j.at("data_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError("interval", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("interval", e.what());
  }
  return c;
}

}  // namespace globest

#include "globest/certify.hpp"

#include "globest/pipeline.hpp"
#include "helpers.hpp"

using namespace globest;
using namespace testutil;

namespace {

QMat q2(long a, long b, long c, long d) {
  QMat m(2, 2);
  m(0, 0) = QComplex(a);
  m(0, 1) = QComplex(b);
  m(1, 0) = QComplex(c);
  m(1, 1) = QComplex(d);
  return m;
}

struct Solved {
  SdpData data;
  PrimalWitness pw;
  DualWitness dw;
};

Solved solve(const StrategyClass& k, const AveragedData& avg) {
  Solved s{SdpData::from(avg), {}, {}};
  auto bp = build_primal(k, s.data);
  auto rp = solve_sdp(bp.real);
  REQUIRE(rp.ok());
  s.pw = primal_from_y(bp, rp.y, s.data);
  auto bd = build_dual(k, s.data);
  auto rd = solve_sdp(bd.real);
  REQUIRE(rd.ok());
  s.dw = dual_from_y(bd, rd.y, s.data);
  return s;
}

}  // namespace

TEST_CASE("decimal rounding") {
  CHECK(round_decimal(1.0 / 3.0, 2) == mpq_class(33, 100));
  CHECK(round_decimal(-0.125, 2) == mpq_class(-13, 100));
  CHECK(round_decimal(7.0, 6) == mpq_class(7));
  CHECK(round_decimal(-3.0, 3) == mpq_class(-3));
  for (int s = 0; s < 20; ++s) {
    CMat m = random_hermitian(3, s);
    QMat q = rationalize(m, 5);
    CHECK(max_abs(to_cmat(q) - m) <= std::sqrt(2.0) * 0.5e-5 + 1e-15);
  }
}

TEST_CASE("rational strings") {
  CHECK(rational_from_string("3/4") == mpq_class(3, 4));
  CHECK(rational_from_string("-12") == mpq_class(-12));
  CHECK(rational_from_string("0.125") == mpq_class(1, 8));
  CHECK(to_string(mpq_class(-6, 8)) == "-3/4");
  CHECK_THROWS(rational_from_string("abc"));
}

TEST_CASE("exact PSD decisions") {
  CHECK(exact_psd(q2(1, 0, 0, 0)));
  CHECK(exact_psd_ldl(q2(1, 0, 0, 0)));
  CHECK_FALSE(exact_psd(q2(1, 2, 2, 1)));
  CHECK_FALSE(exact_psd_ldl(q2(1, 2, 2, 1)));
  CHECK(exact_psd(q2(0, 0, 0, 0)));
  CHECK_FALSE(exact_psd(q2(0, 1, 1, 0)));
  CHECK_FALSE(exact_psd(q2(0, 0, 0, -1)));
  CHECK(exact_psd(q2(1, 1, 1, 1)));
  QMat c(2, 2);
  c(0, 0) = QComplex(1);
  c(0, 1) = QComplex(0, 1);
  c(1, 0) = QComplex(0, -1);
  c(1, 1) = QComplex(1);
  CHECK(exact_psd(c));
  c(1, 1) = QComplex(mpq_class(99, 100));
  CHECK_FALSE(exact_psd(c));
  CHECK_THROWS(exact_psd(q2(1, 2, 0, 1)));
}

TEST_CASE("exact PSD agrees with floating spectra") {
  auto r = check_exact_psd(17, 200);
  CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("exact matrix algebra") {
  QMat a = rationalize(random_hermitian(4, 1), 4);
  QMat inv = inverse(a);
  CHECK(a * inv == QMat::identity(4));
  QMat tall = rationalize(random_density(6, 2).leftCols(3), 5);
  CHECK(left_inverse(tall) * tall == QMat::identity(3));
  CHECK_THROWS_AS(inverse(q2(1, 1, 1, 1)), std::domain_error);
  CHECK(hermitize(rationalize(random_hermitian(3, 5), 3)) == rationalize(random_hermitian(3, 5), 3));
}

TEST_CASE("certified lower bound of an exactly feasible point") {
  auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  SdpData data = SdpData::from(avg);
  ExactData ed = make_exact_data(data, 10);
  PrimalWitness w;
  w.xt = CMat::Identity(16, 16) / 4.0;
  w.b = CMat::Zero(data.q, data.d);
  w.c = CMat::Zero(data.q, data.q);
  for (const auto& k : {StrategyClass::parallel(), StrategyClass::sequential(), StrategyClass::general_ico()}) {
    auto lo = certify_lower(k, w, ed);
    CHECK(lo.bound == 0);
    CHECK(lo.eps == 0);
    CHECK(verify_lower(lo, ed).ok);
  }
}

TEST_CASE("certified upper bound with no information") {
  auto avg = average_choi(ChannelSpec::bit_flip(0.4), 2, Prior::uniform());
  SdpData data = SdpData::from(avg);
  ExactData ed = make_exact_data(data, 10);
  DualWitness w;
  w.yt = CMat::Zero(16, 16);
  w.h = CMat::Zero(data.q, data.q);
  w.lambda = 0;
  auto up = certify_upper(StrategyClass::parallel(), w, ed);
  CHECK(up.lambda == 0);
  CHECK(verify_upper(up, ed).ok);
}

TEST_CASE("flagship certification brackets the numeric optima") {
  auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  ExactData ed = make_exact_data(SdpData::from(avg), 10);
  for (const auto& k : {StrategyClass::parallel(), StrategyClass::sequential(), StrategyClass::causal_superposition(),
                        StrategyClass::general_ico()}) {
    Solved s = solve(k, avg);
    auto lo = certify_lower(k, s.pw, ed);
    auto up = certify_upper(k, s.dw, ed);
    CHECK(verify_lower(lo, ed).ok);
    CHECK(verify_upper(up, ed).ok);
    CHECK(lo.bound <= up.lambda);
    CHECK(to_double(lo.bound) <= s.pw.objective + 1e-6);
    CHECK(to_double(up.lambda) >= s.dw.lambda - 1e-6);
    CHECK(to_double(up.lambda) - to_double(lo.bound) < 1e-4);
    if (k.kind == StrategyKind::sequential) CHECK(to_double(up.lambda) <= 0.5574);
    if (k.kind == StrategyKind::causal_superposition) CHECK(to_double(lo.bound) >= 0.5703);
  }
}

TEST_CASE("certification is continuous under small perturbations") {
  auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  ExactData ed = make_exact_data(SdpData::from(avg), 10);
  Solved s = solve(StrategyClass::parallel(), avg);
  auto base = certify_lower(StrategyClass::parallel(), s.pw, ed);
  PrimalWitness noisy = s.pw;
  noisy.xt += 1e-7 * random_hermitian(16, 3);
  noisy.b += 1e-7 * random_density(16, 4).topRows(s.pw.b.rows());
  auto pert = certify_lower(StrategyClass::parallel(), noisy, ed);
  CHECK(verify_lower(pert, ed).ok);
  CHECK(std::abs(to_double(pert.bound) - to_double(base.bound)) < 1e-5);
}

TEST_CASE("tampered certificates are rejected") {
  auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  ExactData ed = make_exact_data(SdpData::from(avg), 10);
  Solved s = solve(StrategyClass::parallel(), avg);
  auto lo = certify_lower(StrategyClass::parallel(), s.pw, ed);
  auto bad = lo;
  bad.bound += mpq_class(1, 1000);
  CHECK_FALSE(verify_lower(bad, ed).ok);
  auto up = certify_upper(StrategyClass::parallel(), s.dw, ed);
  auto badu = up;
  badu.lambda -= mpq_class(1, 100);
  CHECK_FALSE(verify_upper(badu, ed).ok);
}

TEST_CASE("interval JSON round trip") {
  auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  ExactData ed = make_exact_data(SdpData::from(avg), 10);
  Solved s = solve(StrategyClass::general_ico(), avg);
  CertifyOptions opt;
  auto iv = certify_witnesses(StrategyClass::general_ico(), s.pw, s.dw, ed, opt);
  auto back = interval_from_json(interval_to_json(iv));
  CHECK(back.lower == iv.lower);
  CHECK(back.upper == iv.upper);
  CHECK(back.data_hash == iv.data_hash);
  CHECK(back.k.kind == StrategyKind::general_ico);
  // deterministic re-certification
  auto again = certify_witnesses(StrategyClass::general_ico(), s.pw, s.dw, ed, opt);
  CHECK(again.lower == iv.lower);
  CHECK(again.upper == iv.upper);
}

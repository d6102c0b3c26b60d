#include "globest/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace globest;
using namespace testutil;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("parallel strategy outputs") {
  CMat id_choi = choi_from_kraus({CMat::Identity(2, 2)});
  auto s = parallel_strategy(CVec::Unit(4, 0), 2);
  CMat out = apply_strategy(s, kron(id_choi, id_choi)).matrix();
  CMat p = CMat::Zero(4, 4);
  p(0, 0) = 1;
  CHECK(max_abs(out - p) < 1e-14);
  CHECK(is_valid_tester(StrategyClass::parallel(), s.reduced(), 2).valid);
  CHECK_THROWS_AS(parallel_strategy(CVec::Ones(4), 2), ConfigError);
}

TEST_CASE("sequential strategy without control") {
  CMat id_choi = choi_from_kraus({CMat::Identity(2, 2)});
  auto s = sequential_no_control(plus_state(), 2);
  CMat out = apply_strategy(s, kron(id_choi, id_choi)).matrix();
  CMat pp = plus_state() * plus_state().adjoint();
  CHECK(max_abs(out - pp) < 1e-14);
  CHECK(is_valid_tester(StrategyClass::sequential(), s.reduced(), 2).valid);
  CHECK_THROWS_AS(sequential_no_control(CVec::Unit(4, 0), 2), ConfigError);
}

TEST_CASE("information of fixed strategies on the phase channel") {
  auto u2 = average_choi(ChannelSpec::preset("unitary"), 2, Prior::uniform());
  CHECK(std::abs(info_gain_direct(parallel_strategy(CVec::Unit(4, 0), 2), u2).j) < 1e-12);
  CHECK(info_gain_direct(parallel_strategy(ghz_state(2), 2), u2).j == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(info_gain_direct(sequential_no_control(plus_state(), 2), u2).j == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(info_gain_direct(parallel_strategy(candidate_state(), 2, 4), u2).j >= 1.52);
}

TEST_CASE("imaginary-time identities") {
  auto f2 = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  auto d = verify_ite(parallel_strategy(ghz_state(2), 2), f2);
  CHECK(d.ok);
  CHECK(d.operator_defect < 1e-8);
  CHECK(d.state_defect < 1e-8);
  CHECK(std::abs(d.trace_at_tenth - 1.0) > 1e-4);

  auto flat = average_choi(ChannelSpec::bit_flip(0.3), 1, Prior::uniform());
  auto z = verify_ite(parallel_strategy(plus_state(), 1), flat);
  CHECK(z.ok);
  CHECK(max_abs(flat.tcbar) < 1e-12);
  CHECK(z.trace_at_tenth == doctest::Approx(1.0).epsilon(1e-12));

  auto c = check_ite_random(5, 3);
  CHECK_MESSAGE(c.passed, c.detail);
}

TEST_CASE("jmax for the phase channel with one use") {
  PipelineConfig cfg;
  cfg.n = 1;
  auto r = jmax(StrategyClass::parallel(), ChannelSpec::preset("unitary"), Prior::uniform(), cfg);
  CHECK(r.certified);
  CHECK(r.primal_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.interval.lower <= r.interval.upper);
  CHECK(to_double(r.interval.upper) >= 1.0 - 1e-6);
  CHECK(r.ite.ok);
}

TEST_CASE("flagship hierarchy") {
  PipelineConfig cfg;
  auto rep = hierarchy(ChannelSpec::preset("flagship"), Prior::uniform(), cfg);
  REQUIRE(rep.results.size() == 4);
  CHECK(rep.all_strict());
  CHECK(rep.monotone);
  for (const auto& r : rep.results) {
    CHECK(r.certified);
    CHECK(r.interval.lower <= r.interval.upper);
    CHECK(r.gap() < 1e-6);
  }
  json j = hierarchy_to_json(rep, false);
  CHECK(j["all_strict"] == true);
  CHECK_FALSE(j["results"][0].contains("seconds"));
}

TEST_CASE("hierarchy ordering with bit flips only") {
  PipelineConfig cfg;
  cfg.certify = false;
  auto c = ChannelSpec::compose({ChannelSpec::phase_unitary(), ChannelSpec::bit_flip(0.5)});
  auto rep = hierarchy(c, Prior::uniform(), cfg);
  CHECK(rep.monotone);
}

TEST_CASE("multiplier route gives the same optimum") {
  PipelineConfig a, b;
  b.dual_route = DualRoute::multipliers;
  auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
  auto r1 = jmax(StrategyClass::general_ico(), avg, a);
  auto r2 = jmax(StrategyClass::general_ico(), avg, b);
  CHECK(r2.certified);
  CHECK(r2.dual_value == doctest::Approx(r1.dual_value).epsilon(1e-6));
  CHECK(to_double(r2.interval.upper) == doctest::Approx(to_double(r1.interval.upper)).epsilon(1e-5));
}

TEST_CASE("Bayesian bound") {
  Prior u = Prior::uniform();
  CHECK(bayes_bound(u, 0) == doctest::Approx(M_PI * M_PI / 3));
  CHECK(bayes_bound(u, 0.25) == doctest::Approx(M_PI * M_PI / 3 - 0.25));
  CHECK(bayes_bound(u, prior_second_moment(u)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(bayes_bound(u, 4.0), std::domain_error);
}

TEST_CASE("Wilson interval") {
  auto p = wilson_interval(39, 50);
  CHECK(p.estimate == doctest::Approx(0.78));
  CHECK(p.lo == doctest::Approx(0.6462).epsilon(1e-3));
  CHECK(p.hi == doctest::Approx(0.8725).epsilon(1e-3));
  auto z = wilson_interval(0, 10);
  CHECK(z.lo == 0.0);
  CHECK(z.hi > 0.2);
}

TEST_CASE("grid parsing") {
  auto g = parse_grid("0.1:3.0:15");
  REQUIRE(g.size() == 15);
  CHECK(g.front() == doctest::Approx(0.1));
  CHECK(g.back() == doctest::Approx(3.0));
  CHECK(parse_grid("2:5:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a:2:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), ConfigError);
}

TEST_CASE("sweep parameters") {
  Prior g = with_parameter(Prior::gaussian(0, 1), "delta", 0.5);
  CHECK(g.delta == 0.5);
  CHECK_THROWS_AS(with_parameter(Prior::uniform(), "delta", 0.5), ConfigError);
  CHECK_THROWS_AS(with_parameter(Prior::gaussian(0, 1), "delta", -1.0), ConfigError);
  CHECK_THROWS_AS(with_parameter(Prior::gaussian(0, 1), "kappa", 1.0), ConfigError);
  Prior m = with_parameter(Prior::standard_mixture(0.5), "w", 0.2);
  CHECK(m.weights[0] == doctest::Approx(0.2));
}

TEST_CASE("small prior sweep") {
  SweepSpec spec;
  spec.base = Prior::gaussian(0, 1);
  spec.param = "delta";
  spec.grid = {0.1, 1.0};
  spec.channel = ChannelSpec::preset("flagship");
  PipelineConfig cfg;
  cfg.certify = false;
  auto rows = prior_sweep(spec, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    for (double gap : r.gaps) CHECK(gap > -1e-7);
    CHECK(r.ghz <= r.j[0] + 1e-7);
  }
  CHECK(rows[0].gaps[0] < 0.02);
  CHECK(rows[0].ghz_ratio > rows[1].ghz_ratio - 0.02);
  std::string csv = sweep_csv(rows, "delta", true);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.rfind("delta,m2,J_i,J_ii,J_iii,J_iv,gap_i_ii,gap_ii_iii,gap_iii_iv,J_ghz,ghz_ratio", 0) == 0);
}

TEST_CASE("census seeds and records") {
  CHECK(census_seed(7, 0) == census_seed(7, 0));
  CHECK(census_seed(7, 0) != census_seed(7, 1));
  CHECK(census_seed(7, 0) != census_seed(8, 0));

  PipelineConfig cfg;
  CensusOptions opt;
  opt.count = 1;
  opt.seed = 7;
  opt.records_path = temp_path("globest_census_a.jsonl");
  opt.errors_path = temp_path("globest_census_a.err");
  opt.header = {{"run", "test"}};
  auto s1 = run_census(opt, cfg);
  std::string first = slurp(opt.records_path);
  auto s2 = run_census(opt, cfg);
  CHECK(slurp(opt.records_path) == first);
  CHECK(s1.completed + s1.failed == 1);
  CHECK(s1.records[0].dump() == s2.records[0].dump());
  if (s1.completed == 1) CHECK(s1.records[0]["monotone"] == true);

  // resume with a larger count keeps the existing record and adds one
  opt.count = 2;
  opt.resume = true;
  auto s3 = run_census(opt, cfg);
  CHECK(s3.records.size() == 2);
  CHECK(s3.records[0].dump() == s1.records[0].dump());
  std::string text = slurp(opt.records_path);
  CHECK(text.rfind(first, 0) == 0);
  std::remove(opt.records_path.c_str());
  std::remove(opt.errors_path.c_str());
}

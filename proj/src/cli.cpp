#include "globest/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "globest/invariants.hpp"
#include "globest/kernels.hpp"
#include "globest/records.hpp"

namespace globest {

namespace {

// Locale-independent numeric parsing.
double decimal(const std::string& field, const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(field, "expected a decimal number, got '" + s + "'");
  return v;
}

long integer(const std::string& field, const std::string& s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(field, "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t unsigned_integer(const std::string& field, const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(field, "expected a non-negative integer, got '" + s + "'");
  return v;
}

std::vector<int> parse_order(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(static_cast<int>(integer("order", tok)));
  return out;
}

// Raw option strings shared by the subcommands.
struct Args {
  std::string preset, channel_path;
  std::string prior = "uniform", family, mu, delta, w, a, b, lo, hi, nodes;
  std::string n = "2";
  std::string cls = "parallel";
  std::string order;
  std::string gap_tol = "1e-9", feas_tol = "1e-9", max_iter = "200";
  std::string digits = "6", grid_bits = "40", data_digits = "10";
  bool no_certify = false;
  std::string dual_route = "independent";
  std::string seed = "1", count = "50", ancilla = "4";
  std::string param, grid;
  bool no_ghz = false;
  std::string output, input, errors;
  bool resume = false, full = false;
};

ChannelSpec resolve_channel(const Args& a, const std::string& fallback) {
  if (!a.preset.empty() && !a.channel_path.empty()) throw ConfigError("channel", "give either --preset or --channel");
  if (!a.channel_path.empty()) return channel_from_json(read_json_file(a.channel_path));
  return ChannelSpec::preset(a.preset.empty() ? fallback : a.preset);
}

Prior resolve_prior(const Args& a) {
  std::string fam = a.family.empty() ? a.prior : a.family;
  json j;
  if (fam.size() > 5 && fam.substr(fam.size() - 5) == ".json") {
    j = read_json_file(fam);
  } else {
    j["family"] = fam;
    if (fam == "gaussian") {
      j["mu"] = a.mu.empty() ? 0.0 : decimal("mu", a.mu);
      j["delta"] = a.delta.empty() ? 1.0 : decimal("delta", a.delta);
    } else if (fam == "gaussian_mixture") {
      j["w"] = a.w.empty() ? 0.5 : decimal("w", a.w);
    } else if (fam == "beta") {
      j["a"] = a.a.empty() ? 1.0 : decimal("a", a.a);
      j["b"] = a.b.empty() ? 2.0 : decimal("b", a.b);
    }
    if (!a.lo.empty() || !a.hi.empty()) {
      Prior base = fam == "uniform" ? Prior::uniform() : Prior::gaussian(0, 1);
      j["support"] = {a.lo.empty() ? base.lo : decimal("lo", a.lo), a.hi.empty() ? base.hi : decimal("hi", a.hi)};
    }
    if (!a.nodes.empty()) j["nodes"] = integer("nodes", a.nodes);
  }
  return prior_from_json(j);
}

RunConfig resolve_config(const std::string& command, const Args& a) {
  RunConfig c;
  c.command = command;
  c.n = static_cast<int>(integer("n", a.n));
  c.classes = {a.cls};
  c.order = parse_order(a.order);
  c.gap_tol = decimal("gap_tol", a.gap_tol);
  c.feas_tol = decimal("feas_tol", a.feas_tol);
  c.max_iter = static_cast<int>(integer("max_iter", a.max_iter));
  c.digits = static_cast<int>(integer("digits", a.digits));
  c.grid_bits = static_cast<int>(integer("grid_bits", a.grid_bits));
  c.data_digits = static_cast<int>(integer("data_digits", a.data_digits));
  c.certify = !a.no_certify;
  c.dual_route = a.dual_route;
  c.seed = unsigned_integer("seed", a.seed);
  c.count = integer("count", a.count);
  c.ancilla_dim = static_cast<int>(integer("ancilla", a.ancilla));
  c.param = a.param;
  c.grid = a.grid;
  c.ghz = !a.no_ghz;
  c.output = a.output;
  c.input = a.input;
  c.resume = a.resume;
  c.workers = kernels::worker_count();
  return c;
}

std::string fmt(double v, int prec = 8) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

void print_result(std::ostream& out, const JmaxResult& r) {
  out << "class " << std::left << std::setw(4) << r.k.roman() << " primal " << fmt(r.primal_value) << "  dual "
      << fmt(r.dual_value) << "  gap " << std::scientific << std::setprecision(1) << r.gap() << std::defaultfloat;
  if (r.certified)
    out << "  certified [" << fmt(to_double(r.interval.lower)) << ", " << fmt(to_double(r.interval.upper)) << "]";
  out << "\n";
}

json envelope(const RunConfig& c) { return {{"version", version()}, {"config", run_config_to_json(c)}}; }

int cmd_jmax(const Args& a, std::ostream& out) {
  RunConfig c = resolve_config("jmax", a);
  ChannelSpec ch = resolve_channel(a, "flagship");
  Prior p = resolve_prior(a);
  c.channel = channel_to_json(ch);
  c.prior = prior_to_json(p);
  if (c.output.empty()) c.output = "jmax.json";
  c.validate();
  StrategyClass k = StrategyClass::parse(a.cls);
  JmaxResult r = jmax(k, ch, p, c.pipeline());
  write_text_file(c.output, solution_record(c, r).dump(2) + "\n");
  print_result(out, r);
  out << "wrote " << c.output << "\n";
  return exit_ok;
}

int cmd_hierarchy(const Args& a, std::ostream& out) {
  RunConfig c = resolve_config("hierarchy", a);
  c.classes = {"i", "ii", "iii", "iv"};
  ChannelSpec ch = resolve_channel(a, "flagship");
  Prior p = resolve_prior(a);
  c.channel = channel_to_json(ch);
  c.prior = prior_to_json(p);
  if (c.output.empty()) c.output = "hierarchy.json";
  c.validate();
  HierarchyReport rep = hierarchy(ch, p, c.pipeline());
  json j = envelope(c);
  j["report"] = hierarchy_to_json(rep);
  write_text_file(c.output, j.dump(2) + "\n");
  for (const auto& r : rep.results) print_result(out, r);
  if (c.certify) {
    const char* names[3] = {"i < ii", "ii < iii", "iii < iv"};
    for (int i = 0; i < 3; ++i) out << "strict " << names[i] << ": " << (rep.strict[i] ? "yes" : "no") << "\n";
  }
  out << "monotone optima: " << (rep.monotone ? "yes" : "no") << "\n";
  out << "wrote " << c.output << "\n";
  return exit_ok;
}

int cmd_census(const Args& a, std::ostream& out) {
  RunConfig c = resolve_config("census", a);
  c.classes = {"i", "ii", "iii", "iv"};
  c.channel = {{"kind", "random_parametrized"}, {"ancilla_dim", c.ancilla_dim}};
  c.prior = prior_to_json(Prior::uniform());
  if (c.output.empty()) c.output = "census.jsonl";
  c.validate();
  CensusOptions opt;
  opt.count = c.count;
  opt.seed = c.seed;
  opt.ancilla_dim = c.ancilla_dim;
  opt.records_path = c.output;
  opt.errors_path = a.errors.empty() ? c.output + ".errors.jsonl" : a.errors;
  opt.resume = c.resume;
  // The header leaves out settings that do not change the records.
  json header = envelope(c);
  header["config"].erase("workers");
  header["config"].erase("resume");
  opt.header = header;
  CensusSummary s = run_census(opt, c.pipeline());
  json summary = envelope(c);
  summary["summary"] = census_summary_to_json(s);
  write_text_file(c.output + ".summary.json", summary.dump(2) + "\n");
  out << "channels " << s.completed << "/" << s.requested << " completed, " << s.failed << " failed\n";
  out << "strict hierarchy " << s.strict << "/" << s.completed << " = " << fmt(s.fraction.estimate, 4) << "  95% CI ["
      << fmt(s.fraction.lo, 4) << ", " << fmt(s.fraction.hi, 4) << "]\n";
  out << "monotone violations " << s.monotone_violations << "\n";
  out << "wrote " << c.output << "\n";
  return exit_ok;
}

int cmd_sweep(const Args& a, std::ostream& out) {
  RunConfig c = resolve_config("sweep", a);
  c.classes = {"i", "ii", "iii", "iv"};
  if (a.param.empty()) throw ConfigError("param", "required");
  if (a.grid.empty()) throw ConfigError("grid", "required");
  ChannelSpec ch = resolve_channel(a, "flagship");
  Prior p = resolve_prior(a);
  c.channel = channel_to_json(ch);
  c.prior = prior_to_json(p);
  if (c.output.empty()) c.output = "sweep.csv";
  c.validate();
  SweepSpec spec;
  spec.base = p;
  spec.param = a.param;
  spec.grid = parse_grid(a.grid);
  spec.channel = ch;
  spec.ghz = c.ghz;
  PipelineConfig pc = c.pipeline();
  auto rows = prior_sweep(spec, pc);
  std::string text = "# " + envelope(c).dump() + "\n" + sweep_csv(rows, spec.param, spec.ghz);
  write_text_file(c.output, text);
  out << text.substr(text.find('\n') + 1);
  out << "wrote " << c.output << "\n";
  return exit_ok;
}

int cmd_certify(const Args& a, std::ostream& out) {
  if (a.input.empty()) throw ConfigError("input", "a stored solution file is required");
  json stored = read_json_file(a.input);
  if (!stored.contains("config") || !stored.contains("solution")) throw ConfigError("input", "not a solution file");
  RunConfig c = run_config_from_json(stored["config"]);
  c.command = "certify";
  c.input = a.input;
  c.output = a.output.empty() ? "certify.json" : a.output;
  c.workers = kernels::worker_count();
  c.validate();
  ChannelSpec ch = channel_from_json(c.channel);
  Prior p = prior_from_json(c.prior);
  const json& sol = stored["solution"];
  StrategyClass k = StrategyClass::parse(sol.value("class", std::string()));
  if (sol.contains("order")) k.order = sol["order"].get<std::vector<int>>();
  PrimalWitness pw = primal_witness_from_json(sol.at("primal"));
  DualWitness dw = dual_witness_from_json(sol.at("dual"));
  AveragedData avg = average_choi(ch, c.n, p);
  ExactData ed = make_exact_data(SdpData::from(avg), c.data_digits);
  PipelineConfig pc = c.pipeline();
  CertifiedInterval iv = certify_witnesses(k, pw, dw, ed, pc.cert);
  json j = envelope(c);
  j["interval"] = interval_to_json(iv);
  bool matches = true;
  if (stored.contains("result") && stored["result"].contains("interval")) {
    CertifiedInterval old = interval_from_json(stored["result"]["interval"]);
    matches = old.lower == iv.lower && old.upper == iv.upper && old.data_hash == iv.data_hash;
    j["matches_stored"] = matches;
  }
  write_text_file(c.output, j.dump(2) + "\n");
  out << "class " << k.roman() << " certified [" << fmt(to_double(iv.lower)) << ", " << fmt(to_double(iv.upper)) << "]\n";
  if (j.contains("matches_stored")) out << "matches stored interval: " << (matches ? "yes" : "no") << "\n";
  out << "wrote " << c.output << "\n";
  if (!matches) throw CertificationFailure("re-certified interval differs from the stored one");
  return exit_ok;
}

int cmd_verify(const Args& a, std::ostream& out) {
  RunConfig c = resolve_config("verify", a);
  c.validate();
  auto checks = invariant_suite(c.seed, !a.full);
  bool ok = true;
  json arr = json::array();
  for (const auto& r : checks) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
    arr.push_back(check_to_json(r));
  }
  if (!c.output.empty()) {
    json j = envelope(c);
    j["checks"] = arr;
    j["passed"] = ok;
    write_text_file(c.output, j.dump(2) + "\n");
  }
  return ok ? exit_ok : exit_certification;
}

void add_channel_options(CLI::App* sc, Args& a) {
  sc->add_option("--preset", a.preset, "channel preset: flagship, unitary");
  sc->add_option("--channel", a.channel_path, "channel JSON file");
}

void add_prior_options(CLI::App* sc, Args& a) {
  sc->add_option("--prior", a.prior, "prior family or JSON file")->capture_default_str();
  sc->add_option("--family", a.family, "prior family (alias of --prior)");
  sc->add_option("--mu", a.mu, "gaussian mean");
  sc->add_option("--delta", a.delta, "gaussian width");
  sc->add_option("--w", a.w, "mixture weight");
  sc->add_option("--a", a.a, "beta shape a");
  sc->add_option("--b", a.b, "beta shape b");
  sc->add_option("--lo", a.lo, "support lower end");
  sc->add_option("--hi", a.hi, "support upper end");
  sc->add_option("--nodes", a.nodes, "quadrature nodes");
}

void add_solver_options(CLI::App* sc, Args& a) {
  sc->add_option("--n", a.n, "number of channel uses")->capture_default_str();
  sc->add_option("--order", a.order, "sequential query order, e.g. 2,1");
  sc->add_option("--gap-tol", a.gap_tol, "solver relative gap tolerance")->capture_default_str();
  sc->add_option("--feas-tol", a.feas_tol, "solver feasibility tolerance")->capture_default_str();
  sc->add_option("--max-iter", a.max_iter, "solver iteration limit")->capture_default_str();
  sc->add_option("--digits", a.digits, "decimal digits kept from numeric witnesses")->capture_default_str();
  sc->add_option("--grid-bits", a.grid_bits, "blend parameter grid 2^-bits")->capture_default_str();
  sc->add_option("--data-digits", a.data_digits, "decimal digits of the rationalized data")->capture_default_str();
  sc->add_flag("--no-certify", a.no_certify, "skip exact certification");
  sc->add_option("--dual-route", a.dual_route, "independent or multipliers")->capture_default_str();
  sc->add_option("-o,--output", a.output, "output path");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified bounds on Bayesian phase-estimation information across strategy classes"};
  app.require_subcommand(1);
  Args a;

  auto* jm = app.add_subcommand("jmax", "maximal information for one strategy class");
  add_channel_options(jm, a);
  add_prior_options(jm, a);
  add_solver_options(jm, a);
  jm->add_option("--class", a.cls, "parallel, sequential, causal_superposition, general")->capture_default_str();

  auto* hi = app.add_subcommand("hierarchy", "all four classes with strictness verdicts (n = 2)");
  add_channel_options(hi, a);
  add_prior_options(hi, a);
  add_solver_options(hi, a);

  auto* ce = app.add_subcommand("census", "hierarchy over seeded random channels");
  add_solver_options(ce, a);
  ce->add_option("--count", a.count, "number of channels")->capture_default_str();
  ce->add_option("--seed", a.seed, "master seed")->capture_default_str();
  ce->add_option("--ancilla", a.ancilla, "Stinespring ancilla dimension")->capture_default_str();
  ce->add_option("--errors", a.errors, "per-channel error sidecar");
  ce->add_flag("--resume", a.resume, "continue a partial records file");

  auto* sw = app.add_subcommand("sweep", "class gaps across a prior parameter grid");
  add_channel_options(sw, a);
  add_prior_options(sw, a);
  add_solver_options(sw, a);
  sw->add_option("--param", a.param, "delta, mu, w, a, b or hi");
  sw->add_option("--grid", a.grid, "start:stop:count");
  sw->add_flag("--no-ghz", a.no_ghz, "skip the GHZ column");

  auto* cf = app.add_subcommand("certify", "re-certify a stored numeric solution");
  cf->add_option("--input", a.input, "solution file written by jmax")->required();
  cf->add_option("-o,--output", a.output, "output path");

  auto* ve = app.add_subcommand("verify", "run the invariant suite");
  ve->add_option("--seed", a.seed, "seed")->capture_default_str();
  ve->add_flag("--full", a.full, "full case counts");
  ve->add_option("-o,--output", a.output, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*jm) return cmd_jmax(a, out);
    if (*hi) return cmd_hierarchy(a, out);
    if (*ce) return cmd_census(a, out);
    if (*sw) return cmd_sweep(a, out);
    if (*cf) return cmd_certify(a, out);
    if (*ve) return cmd_verify(a, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const CertificationFailure& e) {
    err << "certification failure: " << e.what() << "\n";
    return exit_certification;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return exit_solver;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return exit_solver;
  }
  return exit_config;
}

}  // namespace globest

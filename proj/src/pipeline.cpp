#include "globest/pipeline.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "globest/kernels.hpp"

namespace globest {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StrategyClass resolve(const StrategyClass& k, const PipelineConfig& cfg) {
  StrategyClass out = k;
  if (out.kind == StrategyKind::sequential && out.order.empty()) out.order = cfg.order;
  return out;
}

std::vector<StrategyClass> hierarchy_classes(const PipelineConfig& cfg) {
  return {StrategyClass::parallel(), StrategyClass::sequential(cfg.order), StrategyClass::causal_superposition(),
          StrategyClass::general_ico()};
}

}  // namespace

JmaxResult jmax(const StrategyClass& k_in, const AveragedData& avg, const PipelineConfig& cfg, const ExactData* exact) {
  const auto t0 = std::chrono::steady_clock::now();
  const StrategyClass k = resolve(k_in, cfg);
  JmaxResult out;
  out.k = k;
  out.ite = verify_ite(avg, 1e-5, cfg.ite_tol);
  if (!out.ite.ok)
    throw CertificationFailure("imaginary-time identity check failed (defect " + std::to_string(out.ite.operator_defect) + ")");

  const SdpData data = SdpData::from(avg);
  BuiltProblem bp = build_primal(k, data);
  SolverResult rp = solve_sdp(bp.real, cfg.solver);
  out.primal_status = rp.status;
  out.primal_iterations = rp.iterations;
  if (!rp.ok()) throw SolverFailure("class " + k.roman() + " primal: " + to_string(rp.status) + " " + rp.message);
  PrimalWitness pw = primal_from_y(bp, rp.y, data);
  out.primal_value = pw.objective;

  DualWitness dw;
  if (cfg.dual_route == DualRoute::independent) {
    BuiltProblem bd = build_dual(k, data);
    SolverResult rd = solve_sdp(bd.real, cfg.solver);
    out.dual_status = rd.status;
    out.dual_iterations = rd.iterations;
    if (!rd.ok()) throw SolverFailure("class " + k.roman() + " dual: " + to_string(rd.status) + " " + rd.message);
    dw = dual_from_y(bd, rd.y, data);
    out.dual_value = dw.lambda;
  } else {
    dw = dual_from_multiplier(bp, rp.x, data);
    out.dual_status = rp.status;
    out.dual_value = rp.primal_objective;
  }

  if (cfg.certify) {
    std::optional<ExactData> own;
    if (!exact) {
      own = make_exact_data(data, cfg.data_digits);
      exact = &*own;
    }
    out.interval = certify_witnesses(k, pw, dw, *exact, cfg.cert);
    out.certified = true;
  }
  out.primal_witness = std::move(pw);
  out.dual_witness = std::move(dw);
  out.seconds = seconds_since(t0);
  return out;
}

CertifiedInterval certify_witnesses(const StrategyClass& k, const PrimalWitness& pw, const DualWitness& dw,
                                    const ExactData& ed, const CertifyOptions& opt) {
  LowerCertificate lo = certify_lower(k, pw, ed, opt);
  UpperCertificate up = certify_upper(k, dw, ed, opt);
  ExactCheck cl = verify_lower(lo, ed);
  if (!cl.ok) throw CertificationFailure("lower-bound witness rejected: " + cl.message);
  ExactCheck cu = verify_upper(up, ed);
  if (!cu.ok) throw CertificationFailure("upper-bound witness rejected: " + cu.message);
  if (lo.bound > up.lambda) throw CertificationFailure("certified lower bound exceeds the upper bound");
  return make_interval(lo, up, ed, opt);
}

JmaxResult jmax(const StrategyClass& k, const ChannelSpec& ch, const Prior& p, const PipelineConfig& cfg) {
  AveragedData avg = average_choi(ch, cfg.n, p);
  return jmax(k, avg, cfg);
}

bool monotone_optima(const HierarchyReport& r, double tol) {
  for (std::size_t i = 0; i + 1 < r.results.size(); ++i) {
    if (r.results[i].primal_value > r.results[i + 1].primal_value + tol) return false;
    if (r.results[i].dual_value > r.results[i + 1].dual_value + tol) return false;
  }
  return true;
}

HierarchyReport hierarchy(const ChannelSpec& ch, const Prior& p, const PipelineConfig& cfg) {
  if (cfg.n != 2) throw ConfigError("n", "the hierarchy report covers two channel uses");
  AveragedData avg = average_choi(ch, cfg.n, p);
  const SdpData data = SdpData::from(avg);
  HierarchyReport rep;
  rep.quadrature_change = avg.quadrature_change;
  std::optional<ExactData> ed;
  if (cfg.certify) {
    ed = make_exact_data(data, cfg.data_digits);
    rep.data_hash = ed->data_hash;
  }
  for (const auto& k : hierarchy_classes(cfg)) rep.results.push_back(jmax(k, avg, cfg, ed ? &*ed : nullptr));
  if (cfg.certify)
    for (int i = 0; i < 3; ++i) rep.strict[i] = rep.results[i + 1].interval.lower > rep.results[i].interval.upper;
  rep.monotone = monotone_optima(rep);
  return rep;
}

json jmax_to_json(const JmaxResult& r, bool with_timings) {
  json j;
  j["class"] = r.k.roman();
  j["name"] = r.k.name();
  if (r.k.kind == StrategyKind::sequential && !r.k.order.empty()) j["order"] = r.k.order;
  j["primal_value"] = r.primal_value;
  j["dual_value"] = r.dual_value;
  j["gap"] = r.gap();
  j["primal_status"] = to_string(r.primal_status);
  j["dual_status"] = to_string(r.dual_status);
  j["primal_iterations"] = r.primal_iterations;
  j["dual_iterations"] = r.dual_iterations;
  j["ite"] = {{"operator_defect", r.ite.operator_defect}, {"tol", r.ite.tol}, {"ok", r.ite.ok}};
  if (r.certified) j["interval"] = interval_to_json(r.interval);
  if (with_timings) j["seconds"] = r.seconds;
  return j;
}

json hierarchy_to_json(const HierarchyReport& r, bool with_timings) {
  json j;
  json res = json::array();
  for (const auto& x : r.results) res.push_back(jmax_to_json(x, with_timings));
  j["results"] = res;
  j["strict"] = {{"i<ii", r.strict[0]}, {"ii<iii", r.strict[1]}, {"iii<iv", r.strict[2]}};
  j["all_strict"] = r.all_strict();
  j["monotone"] = r.monotone;
  if (!r.data_hash.empty()) j["data_hash"] = r.data_hash;
  j["quadrature_change"] = r.quadrature_change;
  return j;
}

Proportion wilson_interval(long successes, long trials, double z) {
  Proportion p;
  if (trials <= 0) return {0, 0, 1};
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double den = 1 + z2 / n;
  const double center = (ph + z2 / (2 * n)) / den;
  const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / den;
  p.estimate = ph;
  p.lo = std::max(0.0, center - half);
  p.hi = std::min(1.0, center + half);
  return p;
}

std::uint64_t census_seed(std::uint64_t seed, long index) {
  // splitmix64 of the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

json census_record(long index, std::uint64_t seed, int ancilla_dim, const PipelineConfig& cfg) {
  json rec;
  rec["index"] = index;
  rec["channel_seed"] = seed;
  rec["ancilla_dim"] = ancilla_dim;
  ChannelSpec ch = random_parametrized_channel(seed, ancilla_dim);
  HierarchyReport rep = hierarchy(ch, Prior::uniform(), cfg);
  rec["status"] = "ok";
  json primal = json::array(), dual = json::array(), lower = json::array(), upper = json::array();
  for (const auto& r : rep.results) {
    primal.push_back(r.primal_value);
    dual.push_back(r.dual_value);
    if (r.certified) {
      lower.push_back(to_string(r.interval.lower));
      upper.push_back(to_string(r.interval.upper));
    }
  }
  rec["primal"] = primal;
  rec["dual"] = dual;
  if (cfg.certify) {
    rec["lower"] = lower;
    rec["upper"] = upper;
    rec["data_hash"] = rep.data_hash;
  }
  rec["strict"] = {rep.strict[0], rep.strict[1], rep.strict[2]};
  rec["strict_all"] = rep.all_strict();
  rec["monotone"] = rep.monotone;
  return rec;
}

void summarize(CensusSummary& s) {
  s.completed = s.failed = s.strict = s.monotone_violations = 0;
  for (const auto& r : s.records) {
    if (r.value("status", "") != "ok") {
      ++s.failed;
      continue;
    }
    ++s.completed;
    if (r.value("strict_all", false)) ++s.strict;
    if (!r.value("monotone", true)) ++s.monotone_violations;
  }
  s.fraction = wilson_interval(s.strict, s.completed);
}

}  // namespace

CensusSummary run_census(const CensusOptions& opt, const PipelineConfig& cfg) {
  if (opt.count < 1) throw ConfigError("count", "must be at least 1");
  CensusSummary s;
  s.requested = opt.count;
  std::set<long> done;
  std::vector<json> existing;
  if (opt.resume && !opt.records_path.empty()) {
    std::ifstream in(opt.records_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        break;  // a torn final line from an interrupted run
      }
      if (!j.contains("index")) continue;
      done.insert(j.at("index").get<long>());
      existing.push_back(j);
    }
  }
  std::ofstream out, err;
  if (!opt.records_path.empty()) {
    if (opt.resume && !existing.empty()) {
      // Rewrite the intact prefix so a torn tail does not survive.
      out.open(opt.records_path, std::ios::trunc);
      out << opt.header.dump() << "\n";
      for (const auto& j : existing) out << j.dump() << "\n";
    } else {
      out.open(opt.records_path, std::ios::trunc);
      out << opt.header.dump() << "\n";
    }
    if (!out) throw ConfigError("output", "cannot write " + opt.records_path);
    out.flush();
  }
  if (!opt.errors_path.empty()) err.open(opt.errors_path, opt.resume ? std::ios::app : std::ios::trunc);

  std::vector<long> todo;
  for (long i = 0; i < opt.count; ++i)
    if (!done.count(i)) todo.push_back(i);
  std::vector<json> fresh(todo.size());
  const long nt = static_cast<long>(todo.size());
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(kernels::worker_count())
  for (long t = 0; t < nt; ++t) {
    const long i = todo[t];
    const std::uint64_t seed = census_seed(opt.seed, i);
    json rec;
    std::string failure;
    try {
      rec = census_record(i, seed, opt.ancilla_dim, cfg);
    } catch (const std::exception& e) {
      failure = e.what();
      rec = {{"index", i}, {"channel_seed", seed}, {"ancilla_dim", opt.ancilla_dim}, {"status", "error"}, {"error", failure}};
    }
#pragma omp ordered
    {
      fresh[t] = rec;
      if (out.is_open()) {
        out << rec.dump() << "\n";
        out.flush();
      }
      if (!failure.empty() && err.is_open()) {
        err << json{{"index", i}, {"channel_seed", seed}, {"error", failure}}.dump() << "\n";
        err.flush();
      }
    }
  }
  s.records = std::move(existing);
  for (auto& r : fresh) s.records.push_back(std::move(r));
  std::sort(s.records.begin(), s.records.end(),
            [](const json& a, const json& b) { return a.at("index").get<long>() < b.at("index").get<long>(); });
  summarize(s);
  return s;
}

json census_summary_to_json(const CensusSummary& s) {
  return {{"requested", s.requested},
          {"completed", s.completed},
          {"failed", s.failed},
          {"strict", s.strict},
          {"strict_fraction", s.fraction.estimate},
          {"wilson95", {s.fraction.lo, s.fraction.hi}},
          {"monotone_violations", s.monotone_violations}};
}

Prior with_parameter(const Prior& base, const std::string& param, double value) {
  Prior p = base;
  if (param == "delta") {
    if (p.family != Prior::Family::gaussian) throw ConfigError("param", "delta applies to the gaussian family");
    p.delta = value;
  } else if (param == "mu") {
    if (p.family != Prior::Family::gaussian) throw ConfigError("param", "mu applies to the gaussian family");
    p.mu = value;
  } else if (param == "w") {
    if (p.family != Prior::Family::gaussian_mixture) throw ConfigError("param", "w applies to the gaussian_mixture family");
    Prior m = Prior::standard_mixture(value);
    m.lo = p.lo;
    m.hi = p.hi;
    m.nodes = p.nodes;
    p = m;
  } else if (param == "a") {
    if (p.family != Prior::Family::beta) throw ConfigError("param", "a applies to the beta family");
    p.a = value;
  } else if (param == "b") {
    if (p.family != Prior::Family::beta) throw ConfigError("param", "b applies to the beta family");
    p.b = value;
  } else if (param == "hi") {
    p.hi = value;
  } else {
    throw ConfigError("param", "unknown sweep parameter " + param);
  }
  p.validate();
  return p;
}

std::vector<SweepRow> prior_sweep(const SweepSpec& spec, const PipelineConfig& cfg) {
  if (spec.grid.empty()) throw ConfigError("grid", "must contain at least one point");
  if (cfg.n != 2) throw ConfigError("n", "the prior sweep covers two channel uses");
  std::vector<Prior> priors;
  for (double v : spec.grid) priors.push_back(with_parameter(spec.base, spec.param, v));
  std::vector<SweepRow> rows(spec.grid.size());
  const long np = static_cast<long>(spec.grid.size());
  std::vector<std::string> errors(np);
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernels::worker_count())
  for (long g = 0; g < np; ++g) {
    try {
      AveragedData avg = average_choi(spec.channel, cfg.n, priors[g]);
      SweepRow row;
      row.value = spec.grid[g];
      row.m2 = avg.m2;
      const SdpData data = SdpData::from(avg);
      std::optional<ExactData> ed;
      if (cfg.certify) ed = make_exact_data(data, cfg.data_digits);
      int c = 0;
      for (const auto& k : hierarchy_classes(cfg)) row.j[c++] = jmax(k, avg, cfg, ed ? &*ed : nullptr).primal_value;
      for (int i = 0; i < 3; ++i) row.gaps[i] = row.j[i + 1] - row.j[i];
      if (spec.ghz) {
        row.ghz = info_gain_direct(parallel_strategy(ghz_state(cfg.n), cfg.n), avg).j;
        row.ghz_ratio = row.j[0] > 0 ? row.ghz / row.j[0] : 0.0;
      }
      rows[g] = row;
    } catch (const std::exception& e) {
      errors[g] = e.what();
    }
  }
  for (long g = 0; g < np; ++g)
    if (!errors[g].empty()) throw SolverFailure("grid point " + std::to_string(spec.grid[g]) + ": " + errors[g]);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& param, bool ghz) {
  std::ostringstream os;
  os.precision(10);
  os << param << ",m2,J_i,J_ii,J_iii,J_iv,gap_i_ii,gap_ii_iii,gap_iii_iv";
  if (ghz) os << ",J_ghz,ghz_ratio";
  os << "\n";
  for (const auto& r : rows) {
    os << r.value << "," << r.m2;
    for (double v : r.j) os << "," << v;
    for (double v : r.gaps) os << "," << v;
    if (ghz) os << "," << r.ghz << "," << r.ghz_ratio;
    os << "\n";
  }
  return os.str();
}

double prior_second_moment(const Prior& p) {
  Quadrature q = prior_quadrature(p, p.nodes);
  double m2 = 0;
  for (std::size_t i = 0; i < q.theta.size(); ++i) m2 += q.weight[i] * q.theta[i] * q.theta[i];
  return m2;
}

double bayes_bound(const Prior& p, double j) {
  const double m2 = prior_second_moment(p);
  if (j > m2 * (1 + 1e-12) + 1e-14) throw std::domain_error("information exceeds the prior second moment");
  return std::max(0.0, m2 - j);
}

std::vector<double> parse_grid(const std::string& spec) {
  auto p1 = spec.find(':');
  auto p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos) throw ConfigError("grid", "expected start:stop:count");
  double a, b;
  long n;
  try {
    std::size_t used = 0;
    const std::string sa = spec.substr(0, p1), sb = spec.substr(p1 + 1, p2 - p1 - 1), sn = spec.substr(p2 + 1);
    a = std::stod(sa, &used);
    if (used != sa.size()) throw std::invalid_argument(sa);
    b = std::stod(sb, &used);
    if (used != sb.size()) throw std::invalid_argument(sb);
    n = std::stol(sn, &used);
    if (used != sn.size()) throw std::invalid_argument(sn);
  } catch (const std::exception&) {
    throw ConfigError("grid", "could not parse " + spec);
  }
  if (n < 1) throw ConfigError("grid", "count must be positive");
  std::vector<double> g;
  for (long i = 0; i < n; ++i) g.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

}  // namespace globest

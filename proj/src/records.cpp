#include "globest/records.hpp"

#include <fstream>
#include <sstream>

namespace globest {

std::string version() {
#ifdef GLOBEST_VERSION
  return GLOBEST_VERSION;
#else
  return "dev";
#endif
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.n = n;
  p.solver.gap_tol = gap_tol;
  p.solver.feas_tol = feas_tol;
  p.solver.max_iter = max_iter;
  p.cert.digits = digits;
  p.cert.grid_bits = grid_bits;
  p.data_digits = data_digits;
  p.certify = certify;
  p.dual_route = dual_route == "multipliers" ? DualRoute::multipliers : DualRoute::independent;
  p.order = order;
  return p;
}

void RunConfig::validate() const {
  if (n < 1 || n > 3) throw ConfigError("n", "supported range is 1..3");
  if (!(gap_tol > 0 && gap_tol < 1)) throw ConfigError("gap_tol", "must lie in (0, 1)");
  if (!(feas_tol > 0 && feas_tol < 1)) throw ConfigError("feas_tol", "must lie in (0, 1)");
  if (max_iter < 1) throw ConfigError("max_iter", "must be positive");
  if (digits < 1 || digits > 15) throw ConfigError("digits", "supported range is 1..15");
  if (grid_bits < 8 || grid_bits > 200) throw ConfigError("grid_bits", "supported range is 8..200");
  if (data_digits < 4 || data_digits > 15) throw ConfigError("data_digits", "supported range is 4..15");
  if (dual_route != "independent" && dual_route != "multipliers")
    throw ConfigError("dual_route", "expected independent or multipliers");
  if (count < 1) throw ConfigError("count", "must be at least 1");
  if (ancilla_dim < 1) throw ConfigError("ancilla_dim", "must be positive");
  for (const auto& c : classes) StrategyClass::parse(c);
  if (!order.empty()) {
    std::vector<int> s = order;
    std::sort(s.begin(), s.end());
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
      if (s[i] != i + 1) throw ConfigError("order", "must be a permutation of 1..n");
    if (static_cast<int>(order.size()) != n) throw ConfigError("order", "must list every channel use");
  }
}

json run_config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.channel.is_null()) j["channel"] = c.channel;
  if (!c.prior.is_null()) j["prior"] = c.prior;
  j["n"] = c.n;
  j["classes"] = c.classes;
  j["order"] = c.order;
  j["solver"] = {{"gap_tol", c.gap_tol}, {"feas_tol", c.feas_tol}, {"max_iter", c.max_iter}};
  j["certification"] = {{"enabled", c.certify},
                        {"digits", c.digits},
                        {"grid_bits", c.grid_bits},
                        {"data_digits", c.data_digits},
                        {"dual_route", c.dual_route}};
  j["seed"] = c.seed;
  j["count"] = c.count;
  j["ancilla_dim"] = c.ancilla_dim;
  if (!c.param.empty()) j["param"] = c.param;
  if (!c.grid.empty()) j["grid"] = c.grid;
  j["ghz"] = c.ghz;
  j["output"] = c.output;
  if (!c.input.empty()) j["input"] = c.input;
  j["resume"] = c.resume;
  j["workers"] = c.workers;
  return j;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  RunConfig c;
  c.command = get_or<std::string>(j, "command", "");
  if (j.contains("channel")) c.channel = j["channel"];
  if (j.contains("prior")) c.prior = j["prior"];
  c.n = get_or(j, "n", c.n);
  c.classes = get_or(j, "classes", c.classes);
  c.order = get_or(j, "order", c.order);
  if (j.contains("solver")) {
    const json& s = j["solver"];
    c.gap_tol = get_or(s, "gap_tol", c.gap_tol);
    c.feas_tol = get_or(s, "feas_tol", c.feas_tol);
    c.max_iter = get_or(s, "max_iter", c.max_iter);
  }
  if (j.contains("certification")) {
    const json& s = j["certification"];
    c.certify = get_or(s, "enabled", c.certify);
    c.digits = get_or(s, "digits", c.digits);
    c.grid_bits = get_or(s, "grid_bits", c.grid_bits);
    c.data_digits = get_or(s, "data_digits", c.data_digits);
    c.dual_route = get_or(s, "dual_route", c.dual_route);
  }
  c.seed = get_or(j, "seed", c.seed);
  c.count = get_or(j, "count", c.count);
  c.ancilla_dim = get_or(j, "ancilla_dim", c.ancilla_dim);
  c.param = get_or(j, "param", c.param);
  c.grid = get_or(j, "grid", c.grid);
  c.ghz = get_or(j, "ghz", c.ghz);
  c.output = get_or(j, "output", c.output);
  c.input = get_or(j, "input", c.input);
  c.resume = get_or(j, "resume", c.resume);
  c.workers = get_or(j, "workers", c.workers);
  return c;
}

namespace {

void put(json& j, const char* key, const CMat& m) {
  if (m.size() > 0) j[key] = cmat_to_json(m);
}

CMat take(const json& j, const char* key) {
  if (!j.contains(key)) return CMat();
  return cmat_from_json(j[key], key);
}

}  // namespace

json primal_witness_to_json(const PrimalWitness& w) {
  json j;
  put(j, "xt", w.xt);
  put(j, "xt1", w.xt1);
  put(j, "xt2", w.xt2);
  put(j, "b", w.b);
  put(j, "c", w.c);
  j["objective"] = w.objective;
  return j;
}

PrimalWitness primal_witness_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("primal", "expected a JSON object");
  PrimalWitness w;
  w.xt = take(j, "xt");
  w.xt1 = take(j, "xt1");
  w.xt2 = take(j, "xt2");
  w.b = take(j, "b");
  w.c = take(j, "c");
  if (w.xt.size() == 0 || w.b.size() == 0 || w.c.size() == 0) throw ConfigError("primal", "missing xt, b or c");
  w.objective = get_or(j, "objective", 0.0);
  return w;
}

json dual_witness_to_json(const DualWitness& w) {
  json j;
  put(j, "yt", w.yt);
  put(j, "yt1", w.yt1);
  put(j, "yt2", w.yt2);
  put(j, "h", w.h);
  j["lambda"] = w.lambda;
  return j;
}

DualWitness dual_witness_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("dual", "expected a JSON object");
  DualWitness w;
  w.yt = take(j, "yt");
  w.yt1 = take(j, "yt1");
  w.yt2 = take(j, "yt2");
  w.h = take(j, "h");
  if (w.h.size() == 0) throw ConfigError("dual", "missing h");
  if (!j.contains("lambda")) throw ConfigError("dual", "missing lambda");
  w.lambda = get_or(j, "lambda", 0.0);
  return w;
}

json solution_record(const RunConfig& c, const JmaxResult& r) {
  json j;
  j["version"] = version();
  j["config"] = run_config_to_json(c);
  j["result"] = jmax_to_json(r);
  j["solution"] = {{"class", r.k.roman()},
                   {"order", r.k.order},
                   {"primal", primal_witness_to_json(r.primal_witness)},
                   {"dual", dual_witness_to_json(r.dual_witness)}};
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("input", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ConfigError("input", path + " is not valid JSON (" + e.what() + ")");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("output", "cannot write " + path);
  out << text;
  if (!out) throw ConfigError("output", "write failed for " + path);
}

}  // namespace globest

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "globest/certify.hpp"
#include "globest/strategies.hpp"

namespace globest {

enum class DualRoute { independent, multipliers };

struct PipelineConfig {
  int n = 2;
  SolverConfig solver;
  CertifyOptions cert;
  int data_digits = 10;
  bool certify = true;
  DualRoute dual_route = DualRoute::independent;
  double ite_tol = 1e-8;
  std::vector<int> order;  // sequential query order; empty means 1,2,...,N
};

struct JmaxResult {
  StrategyClass k;
  double primal_value = 0;  // numeric optimum of the maximization
  double dual_value = 0;    // numeric optimum of the minimization
  SolverStatus primal_status = SolverStatus::numerical;
  SolverStatus dual_status = SolverStatus::numerical;
  int primal_iterations = 0, dual_iterations = 0;
  bool certified = false;
  CertifiedInterval interval;
  IteDiagnostics ite;
  PrimalWitness primal_witness;
  DualWitness dual_witness;
  double seconds = 0;

  double gap() const { return dual_value - primal_value; }
};

// Averaging, ITE gate, both SDPs and (optionally) exact certification.
JmaxResult jmax(const StrategyClass& k, const AveragedData& avg, const PipelineConfig& cfg,
                const ExactData* exact = nullptr);
JmaxResult jmax(const StrategyClass& k, const ChannelSpec& ch, const Prior& p, const PipelineConfig& cfg);

// Exact certification of numeric witnesses in both directions; throws CertificationFailure.
CertifiedInterval certify_witnesses(const StrategyClass& k, const PrimalWitness& pw, const DualWitness& dw,
                                    const ExactData& ed, const CertifyOptions& opt);

struct HierarchyReport {
  std::vector<JmaxResult> results;  // i, ii, iii, iv
  bool strict[3] = {false, false, false};
  bool monotone = false;  // numeric optima ordered within 1e-7
  std::string data_hash;
  double quadrature_change = 0;

  bool all_strict() const { return strict[0] && strict[1] && strict[2]; }
};

HierarchyReport hierarchy(const ChannelSpec& ch, const Prior& p, const PipelineConfig& cfg);
bool monotone_optima(const HierarchyReport& r, double tol = 1e-7);
json hierarchy_to_json(const HierarchyReport& r, bool with_timings = true);
json jmax_to_json(const JmaxResult& r, bool with_timings = true);

// Wilson score interval for a binomial proportion.
struct Proportion {
  double estimate = 0, lo = 0, hi = 0;
};
Proportion wilson_interval(long successes, long trials, double z = 1.959963984540054);

std::uint64_t census_seed(std::uint64_t seed, long index);

struct CensusOptions {
  long count = 50;
  std::uint64_t seed = 1;
  int ancilla_dim = 4;
  std::string records_path;  // JSONL; empty keeps records in memory only
  std::string errors_path;   // sidecar for per-item failures
  bool resume = false;
  json header;               // embedded in the first line of the records file
};

struct CensusSummary {
  long requested = 0, completed = 0, failed = 0, strict = 0, monotone_violations = 0;
  Proportion fraction;
  std::vector<json> records;
};

CensusSummary run_census(const CensusOptions& opt, const PipelineConfig& cfg);
json census_summary_to_json(const CensusSummary& s);

struct SweepSpec {
  Prior base;
  std::string param;  // delta, mu, w, a, b, hi
  std::vector<double> grid;
  ChannelSpec channel;
  bool ghz = true;
};

struct SweepRow {
  double value = 0;
  double j[4] = {0, 0, 0, 0};
  double gaps[3] = {0, 0, 0};
  double ghz = 0, ghz_ratio = 0;
  double m2 = 0;
};

Prior with_parameter(const Prior& base, const std::string& param, double value);
std::vector<SweepRow> prior_sweep(const SweepSpec& spec, const PipelineConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& param, bool ghz);

// m2 - J; throws std::domain_error when J exceeds m2.
double bayes_bound(const Prior& p, double j);
double prior_second_moment(const Prior& p);

std::vector<double> parse_grid(const std::string& spec);  // start:stop:count

}  // namespace globest

#pragma once

#include <string>
#include <vector>

#include "globest/pipeline.hpp"

namespace globest {

std::string version();

// Fully resolved settings of one CLI invocation. Embedded in every output file.
struct RunConfig {
  std::string command;
  json channel;  // resolved channel description
  json prior;    // resolved prior description
  int n = 2;
  std::vector<std::string> classes;
  std::vector<int> order;
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iter = 200;
  int digits = 6;
  int grid_bits = 40;
  int data_digits = 10;
  bool certify = true;
  std::string dual_route = "independent";
  std::uint64_t seed = 1;
  long count = 50;
  int ancilla_dim = 4;
  std::string param;
  std::string grid;
  bool ghz = true;
  std::string output;
  std::string input;
  bool resume = false;
  int workers = 1;

  PipelineConfig pipeline() const;
  void validate() const;
};

json run_config_to_json(const RunConfig& c);
RunConfig run_config_from_json(const json& j);

json primal_witness_to_json(const PrimalWitness& w);
PrimalWitness primal_witness_from_json(const json& j);
json dual_witness_to_json(const DualWitness& w);
DualWitness dual_witness_from_json(const json& j);

// {version, config, result, solution}; solution carries the numeric witnesses.
json solution_record(const RunConfig& c, const JmaxResult& r);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace globest

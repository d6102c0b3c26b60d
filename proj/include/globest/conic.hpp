#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "globest/json_io.hpp"
#include "globest/spaces.hpp"

namespace globest {

struct VarGroup {
  std::string name;
  long begin = 0;
  long count = 0;
};

// Real conic program in standard form
//   minimize   c.x + offset   s.t.  A x = b,  x in R^f x S+^{n_1} x ... x S+^{n_k}
// with dual
//   maximize   b.y + offset   s.t.  c - A^T y in {0}^f x S+^{n_1} x ...
// x stacks the free part, then each block column-major in full storage.
struct ConicProblem {
  long free_count = 0;
  std::vector<int> block_sizes;
  std::vector<std::string> block_names;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  RVec b;
  RVec c;
  double offset = 0;
  std::vector<VarGroup> y_groups;  // names for coordinates of y

  long m() const { return b.size(); }
  long vec_length() const;
  long block_offset(std::size_t k) const;
  void validate() const;
};

json export_problem(const ConicProblem& p);
ConicProblem import_problem(const json& j);

// Symmetric block view of the x-layout vector.
std::vector<RMat> unpack_blocks(const ConicProblem& p, const RVec& x);
RVec pack_blocks(const ConicProblem& p, const RVec& free_part, const std::vector<RMat>& blocks);

}  // namespace globest

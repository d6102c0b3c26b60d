#pragma once

#include <functional>
#include <vector>

#include "globest/spaces.hpp"

// Data-parallel hot loops. Every parallel kernel has a serial twin with the
// same arithmetic order so results agree bit for bit.
namespace globest::kernels {

// Sparse symmetric matrix restricted to one PSD block, full (both triangles) storage.
struct BlockEntries {
  int block = 0;
  std::vector<int> row, col;
  std::vector<double> val;
  std::vector<int> distinct_cols;  // sorted distinct values of col
};

// One equality constraint: its coefficient matrices on each block it touches.
using Constraint = std::vector<BlockEntries>;

void finalize_columns(BlockEntries& e);

// M(i, j) = <A_i, X A_j Zinv>, summed over blocks.
void schur_serial(const std::vector<Constraint>& a, const std::vector<RMat>& x, const std::vector<RMat>& zinv, RMat& m);
void schur_parallel(const std::vector<Constraint>& a, const std::vector<RMat>& x, const std::vector<RMat>& zinv, RMat& m);

struct Moments {
  CMat c, tc;
  double m1 = 0, m2 = 0;
};

// Weighted sums of f(theta) and theta f(theta) over quadrature nodes; the
// reduction always runs in node order.
Moments moments_serial(const std::function<CMat(double)>& f, const std::vector<double>& theta,
                       const std::vector<double>& weight);
Moments moments_parallel(const std::function<CMat(double)>& f, const std::vector<double>& theta,
                         const std::vector<double>& weight);

int worker_count();

// Sets flush-to-zero and denormals-are-zero for the calling thread while alive.
// Subnormal values appear in late interior-point iterates and slow dense
// factorizations by an order of magnitude.
class FlushDenormals {
 public:
  FlushDenormals();
  ~FlushDenormals();
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

}  // namespace globest::kernels

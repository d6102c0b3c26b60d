#include "globest/kernels.hpp"

#include <omp.h>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include <algorithm>
#include <cstdlib>
#include <string>

namespace globest::kernels {

int worker_count() {
  if (const char* env = std::getenv("GLOBEST_WORKERS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1, omp_get_max_threads());
}

FlushDenormals::FlushDenormals() {
#if defined(__SSE2__)
  saved_ = _mm_getcsr();
  _mm_setcsr(saved_ | 0x8040u);
#endif
}

FlushDenormals::~FlushDenormals() {
#if defined(__SSE2__)
  _mm_setcsr(saved_);
#endif
}

void finalize_columns(BlockEntries& e) {
  e.distinct_cols = e.col;
  std::sort(e.distinct_cols.begin(), e.distinct_cols.end());
  e.distinct_cols.erase(std::unique(e.distinct_cols.begin(), e.distinct_cols.end()), e.distinct_cols.end());
}

namespace {

// Fills column j (rows i >= j) of the Schur matrix.
void schur_column(long j, const std::vector<Constraint>& a, const std::vector<RMat>& x,
                  const std::vector<RMat>& zinv, std::vector<RMat>& g, std::vector<char>& has, RMat& t, RMat& m) {
  std::fill(has.begin(), has.end(), 0);
  for (const auto& e : a[j]) {
    const RMat& xb = x[e.block];
    const RMat& zb = zinv[e.block];
    const long n = xb.rows();
    const long k = static_cast<long>(e.distinct_cols.size());
    t.setZero(n, k);
    for (std::size_t p = 0; p < e.val.size(); ++p) {
      long c = std::lower_bound(e.distinct_cols.begin(), e.distinct_cols.end(), e.col[p]) - e.distinct_cols.begin();
      t.col(c).noalias() += e.val[p] * xb.col(e.row[p]);
    }
    RMat zr(k, n);
    for (long c = 0; c < k; ++c) zr.row(c) = zb.row(e.distinct_cols[c]);
    g[e.block].noalias() = t * zr;
    has[e.block] = 1;
  }
  const long mm = static_cast<long>(a.size());
  for (long i = j; i < mm; ++i) {
    double s = 0.0;
    for (const auto& e : a[i]) {
      if (!has[e.block]) continue;
      const RMat& gb = g[e.block];
      for (std::size_t p = 0; p < e.val.size(); ++p) s += e.val[p] * gb(e.col[p], e.row[p]);
    }
    m(i, j) = s;
  }
}

void mirror_lower(RMat& m) {
  const long n = m.rows();
  for (long j = 0; j < n; ++j)
    for (long i = j + 1; i < n; ++i) m(j, i) = m(i, j);
}

}  // namespace

void schur_serial(const std::vector<Constraint>& a, const std::vector<RMat>& x, const std::vector<RMat>& zinv, RMat& m) {
  const long mm = static_cast<long>(a.size());
  m.setZero(mm, mm);
  std::vector<RMat> g(x.size());
  for (std::size_t b = 0; b < x.size(); ++b) g[b].resize(x[b].rows(), x[b].rows());
  std::vector<char> has(x.size());
  RMat t;
  for (long j = 0; j < mm; ++j) schur_column(j, a, x, zinv, g, has, t, m);
  mirror_lower(m);
}

void schur_parallel(const std::vector<Constraint>& a, const std::vector<RMat>& x, const std::vector<RMat>& zinv, RMat& m) {
  const long mm = static_cast<long>(a.size());
  m.setZero(mm, mm);
#pragma omp parallel num_threads(worker_count())
  {
    FlushDenormals ftz;
    std::vector<RMat> g(x.size());
    for (std::size_t b = 0; b < x.size(); ++b) g[b].resize(x[b].rows(), x[b].rows());
    std::vector<char> has(x.size());
    RMat t;
#pragma omp for schedule(dynamic, 4)
    for (long j = 0; j < mm; ++j) schur_column(j, a, x, zinv, g, has, t, m);
  }
  mirror_lower(m);
}

Moments moments_serial(const std::function<CMat(double)>& f, const std::vector<double>& theta,
                       const std::vector<double>& weight) {
  Moments out;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    CMat v = f(theta[k]);
    if (k == 0) {
      out.c = CMat::Zero(v.rows(), v.cols());
      out.tc = CMat::Zero(v.rows(), v.cols());
    }
    out.c += weight[k] * v;
    out.tc += (weight[k] * theta[k]) * v;
    out.m1 += weight[k] * theta[k];
    out.m2 += weight[k] * theta[k] * theta[k];
  }
  return out;
}

Moments moments_parallel(const std::function<CMat(double)>& f, const std::vector<double>& theta,
                         const std::vector<double>& weight) {
  const int workers = worker_count();
  if (workers <= 1) return moments_serial(f, theta, weight);
  const long n = static_cast<long>(theta.size());
  std::vector<CMat> vals(n);
#pragma omp parallel for schedule(static) num_threads(workers)
  for (long k = 0; k < n; ++k) vals[k] = f(theta[k]);
  Moments out;
  for (long k = 0; k < n; ++k) {
    const CMat& v = vals[k];
    if (k == 0) {
      out.c = CMat::Zero(v.rows(), v.cols());
      out.tc = CMat::Zero(v.rows(), v.cols());
    }
    out.c += weight[k] * v;
    out.tc += (weight[k] * theta[k]) * v;
    out.m1 += weight[k] * theta[k];
    out.m2 += weight[k] * theta[k] * theta[k];
  }
  return out;
}

}  // namespace globest::kernels

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace globest {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct Subsystem {
  std::string name;
  int dim = 1;
};

// Ordered list of named tensor factors. Index 0 is the most significant factor.
class SpaceRegistry {
 public:
  SpaceRegistry() = default;
  explicit SpaceRegistry(std::vector<Subsystem> parts);

  // I1,O1,...,IN,ON with the given local dimension.
  static SpaceRegistry copies(int n, int local_dim = 2);

  std::size_t size() const { return parts_.size(); }
  const Subsystem& operator[](std::size_t i) const { return parts_[i]; }
  const std::vector<Subsystem>& parts() const { return parts_; }

  bool contains(const std::string& name) const;
  int index_of(const std::string& name) const;
  long total_dim() const;
  std::vector<int> dims() const;
  std::vector<std::string> names() const;

  long input_dim() const;   // product over I<k>
  long output_dim() const;  // product over O<k>
  long other_dim() const;   // everything else (output register, ancillas)

  std::uint32_t mask_of(std::span<const std::string> names) const;
  SpaceRegistry concat(const SpaceRegistry& other) const;
  SpaceRegistry without(std::span<const std::string> names) const;

  bool operator==(const SpaceRegistry& o) const;

 private:
  std::vector<Subsystem> parts_;
};

bool is_input_name(const std::string& name);
bool is_output_name(const std::string& name);

class LabeledOperator {
 public:
  LabeledOperator() = default;
  LabeledOperator(SpaceRegistry reg, CMat data);

  const SpaceRegistry& registry() const { return reg_; }
  const CMat& matrix() const { return data_; }
  CMat& matrix() { return data_; }
  long dim() const { return data_.rows(); }

 private:
  SpaceRegistry reg_;
  CMat data_;
};

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator partial_trace(const LabeledOperator& a, std::span<const std::string> names);
LabeledOperator trace_replace(const LabeledOperator& a, std::span<const std::string> names);
LabeledOperator permute(const LabeledOperator& a, std::span<const std::string> order);
LabeledOperator identity_on(const SpaceRegistry& reg);

struct HermEig {
  RVec values;  // descending
  CMat vectors; // columns match values
};

double hermiticity_defect(const CMat& a);
HermEig herm_eig(const CMat& a, double tol = 1e-10);

struct SldResult {
  CMat s;
  int support_rank = 0;
  double residual = 0.0;
};

// Solves m = (r s + s r)/2 on the support of r; s vanishes off the support.
SldResult solve_sld(const CMat& r, const CMat& m, double rank_tol = 1e-10);

CMat pinv(const CMat& a, double rel_tol = 1e-12);
CMat hermitian_part(const CMat& a);
CMat kron(const CMat& a, const CMat& b);

namespace detail {

inline std::vector<long> strides_of(std::span<const int> dims) {
  std::vector<long> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

inline long masked_offset(long idx, std::span<const int> dims, std::span<const long> strides,
                          std::uint32_t mask) {
  long off = 0;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (mask & (1u << k)) off += ((idx / strides[k]) % dims[k]) * strides[k];
  return off;
}

// All offsets spanned by the masked factors.
inline std::vector<long> masked_offsets(std::span<const int> dims, std::span<const long> strides,
                                        std::uint32_t mask) {
  std::vector<long> offs{0};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!(mask & (1u << k))) continue;
    std::vector<long> next;
    next.reserve(offs.size() * dims[k]);
    for (long o : offs)
      for (int j = 0; j < dims[k]; ++j) next.push_back(o + j * strides[k]);
    offs = std::move(next);
  }
  return offs;
}

// Indices whose masked digits are all zero.
inline std::vector<long> unmasked_bases(std::span<const int> dims, std::span<const long> strides,
                                        std::uint32_t mask) {
  std::uint32_t full = dims.empty() ? 0u : ((1u << dims.size()) - 1u);
  return masked_offsets(dims, strides, full & ~mask);
}

inline long masked_dim(std::span<const int> dims, std::uint32_t mask) {
  long d = 1;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (mask & (1u << k)) d *= dims[k];
  return d;
}

}  // namespace detail

// Matrix adaptor so the same kernels run on floating and exact matrices.
template <class Mat>
struct MatTraits;

template <>
struct MatTraits<CMat> {
  using Scalar = cd;
  static CMat zero(long n) { return CMat::Zero(n, n); }
  static void div(Scalar& x, long k) { x /= static_cast<double>(k); }
  static void mul(Scalar& x, long k) { x *= static_cast<double>(k); }
};

// Replaces the masked factors by their normalized identity after tracing them out.
template <class Mat>
Mat trace_replace_mask(const Mat& a, std::span<const int> dims, std::uint32_t mask) {
  using T = MatTraits<Mat>;
  const long n = a.rows();
  if (mask == 0) return a;
  auto strides = detail::strides_of(dims);
  auto offs = detail::masked_offsets(dims, strides, mask);
  auto bases = detail::unmasked_bases(dims, strides, mask);
  const long dq = static_cast<long>(offs.size());
  Mat out = T::zero(n);
  for (long br : bases)
    for (long bc : bases) {
      typename T::Scalar acc{};
      for (long o : offs) acc += a(br + o, bc + o);
      T::div(acc, dq);
      for (long o : offs) out(br + o, bc + o) = acc;
    }
  return out;
}

template <class Mat>
Mat partial_trace_mask(const Mat& a, std::span<const int> dims, std::uint32_t mask) {
  using T = MatTraits<Mat>;
  auto strides = detail::strides_of(dims);
  auto offs = detail::masked_offsets(dims, strides, mask);
  auto bases = detail::unmasked_bases(dims, strides, mask);
  const long m = static_cast<long>(bases.size());
  Mat out = T::zero(m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j) {
      typename T::Scalar acc{};
      for (long o : offs) acc += a(bases[i] + o, bases[j] + o);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace globest

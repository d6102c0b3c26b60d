#include "globest/spaces.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cctype>
#include <unsupported/Eigen/KroneckerProduct>

namespace globest {

namespace {

bool indexed_name(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

bool is_input_name(const std::string& name) { return indexed_name(name, 'I'); }
bool is_output_name(const std::string& name) { return indexed_name(name, 'O'); }

SpaceRegistry::SpaceRegistry(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
  if (parts_.size() > 31) throw std::invalid_argument("registry: too many subsystems");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].dim < 1) throw std::invalid_argument("registry: non-positive dimension for " + parts_[i].name);
    for (std::size_t j = 0; j < i; ++j)
      if (parts_[i].name == parts_[j].name) throw std::invalid_argument("registry: duplicate subsystem " + parts_[i].name);
  }
}

SpaceRegistry SpaceRegistry::copies(int n, int local_dim) {
  if (n < 1) throw std::invalid_argument("registry: need at least one copy");
  std::vector<Subsystem> parts;
  for (int k = 1; k <= n; ++k) {
    parts.push_back({"I" + std::to_string(k), local_dim});
    parts.push_back({"O" + std::to_string(k), local_dim});
  }
  return SpaceRegistry(std::move(parts));
}

bool SpaceRegistry::contains(const std::string& name) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const Subsystem& s) { return s.name == name; });
}

int SpaceRegistry::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("registry: unknown subsystem " + name);
}

long SpaceRegistry::total_dim() const {
  long d = 1;
  for (const auto& p : parts_) d *= p.dim;
  return d;
}

std::vector<int> SpaceRegistry::dims() const {
  std::vector<int> d;
  for (const auto& p : parts_) d.push_back(p.dim);
  return d;
}

std::vector<std::string> SpaceRegistry::names() const {
  std::vector<std::string> n;
  for (const auto& p : parts_) n.push_back(p.name);
  return n;
}

long SpaceRegistry::input_dim() const {
  long d = 1;
  for (const auto& p : parts_)
    if (is_input_name(p.name)) d *= p.dim;
  return d;
}

long SpaceRegistry::output_dim() const {
  long d = 1;
  for (const auto& p : parts_)
    if (is_output_name(p.name)) d *= p.dim;
  return d;
}

long SpaceRegistry::other_dim() const {
  long d = 1;
  for (const auto& p : parts_)
    if (!is_input_name(p.name) && !is_output_name(p.name)) d *= p.dim;
  return d;
}

std::uint32_t SpaceRegistry::mask_of(std::span<const std::string> names) const {
  std::uint32_t m = 0;
  for (const auto& n : names) m |= 1u << index_of(n);
  return m;
}

SpaceRegistry SpaceRegistry::concat(const SpaceRegistry& other) const {
  auto p = parts_;
  p.insert(p.end(), other.parts_.begin(), other.parts_.end());
  return SpaceRegistry(std::move(p));
}

SpaceRegistry SpaceRegistry::without(std::span<const std::string> names) const {
  std::uint32_t m = mask_of(names);
  std::vector<Subsystem> p;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (!(m & (1u << i))) p.push_back(parts_[i]);
  return SpaceRegistry(std::move(p));
}

bool SpaceRegistry::operator==(const SpaceRegistry& o) const {
  if (parts_.size() != o.parts_.size()) return false;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].name != o.parts_[i].name || parts_[i].dim != o.parts_[i].dim) return false;
  return true;
}

LabeledOperator::LabeledOperator(SpaceRegistry reg, CMat data) : reg_(std::move(reg)), data_(std::move(data)) {
  if (data_.rows() != data_.cols() || data_.rows() != reg_.total_dim())
    throw std::invalid_argument("operator: matrix shape does not match registry dimension");
}

CMat kron(const CMat& a, const CMat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
  return LabeledOperator(a.registry().concat(b.registry()), kron(a.matrix(), b.matrix()));
}

LabeledOperator partial_trace(const LabeledOperator& a, std::span<const std::string> names) {
  auto dims = a.registry().dims();
  std::uint32_t mask = a.registry().mask_of(names);
  return LabeledOperator(a.registry().without(names), partial_trace_mask(a.matrix(), dims, mask));
}

LabeledOperator trace_replace(const LabeledOperator& a, std::span<const std::string> names) {
  auto dims = a.registry().dims();
  std::uint32_t mask = a.registry().mask_of(names);
  return LabeledOperator(a.registry(), trace_replace_mask(a.matrix(), dims, mask));
}

LabeledOperator permute(const LabeledOperator& a, std::span<const std::string> order) {
  const auto& reg = a.registry();
  if (order.size() != reg.size()) throw std::invalid_argument("permute: order must name every subsystem");
  std::vector<Subsystem> parts;
  std::vector<int> src;
  for (const auto& n : order) {
    int i = reg.index_of(n);
    src.push_back(i);
    parts.push_back(reg[i]);
  }
  SpaceRegistry out_reg(parts);
  auto in_strides = detail::strides_of(reg.dims());
  auto out_dims = out_reg.dims();
  const long n = reg.total_dim();
  // map[new index] = old index
  std::vector<long> map(n);
  for (long idx = 0; idx < n; ++idx) {
    long rem = idx, old = 0;
    for (int k = static_cast<int>(out_dims.size()) - 1; k >= 0; --k) {
      long digit = rem % out_dims[k];
      rem /= out_dims[k];
      old += digit * in_strides[src[k]];
    }
    map[idx] = old;
  }
  CMat out(n, n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) out(i, j) = a.matrix()(map[i], map[j]);
  return LabeledOperator(out_reg, out);
}

LabeledOperator identity_on(const SpaceRegistry& reg) {
  return LabeledOperator(reg, CMat::Identity(reg.total_dim(), reg.total_dim()));
}

double hermiticity_defect(const CMat& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CMat hermitian_part(const CMat& a) { return (a + a.adjoint()) / 2.0; }

HermEig herm_eig(const CMat& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("herm_eig: matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermiticity_defect(a) > tol * scale) throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
  const long n = a.rows();
  HermEig out{RVec(n), CMat(n, n)};
  for (long i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

SldResult solve_sld(const CMat& r, const CMat& m, double rank_tol) {
  if (r.rows() != m.rows() || r.cols() != m.cols()) throw std::invalid_argument("solve_sld: shape mismatch");
  auto eig = herm_eig(r);
  const long n = r.rows();
  const double lmax = std::max(eig.values.cwiseAbs().maxCoeff(), 0.0);
  if (eig.values.minCoeff() < -1e-8 * std::max(lmax, 1.0))
    throw std::invalid_argument("solve_sld: first argument is not positive semidefinite");
  const double cut = rank_tol * lmax;
  SldResult res;
  res.support_rank = static_cast<int>((eig.values.array() > cut).count());
  const CMat& v = eig.vectors;
  CMat mt = v.adjoint() * m * v;
  CMat st = CMat::Zero(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      double den = eig.values(i) + eig.values(j);
      if (den > cut) st(i, j) = 2.0 * mt(i, j) / den;
    }
  res.s = v * st * v.adjoint();
  res.residual = (m - (r * res.s + res.s * r) / 2.0).norm();
  return res;
}

CMat pinv(const CMat& a, double rel_tol) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = s.size() ? rel_tol * s(0) : 0.0;
  RVec inv = RVec::Zero(s.size());
  for (long i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace globest

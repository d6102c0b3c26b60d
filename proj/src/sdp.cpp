#include "globest/sdp.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace globest {

const VarGroup& HermitianProblem::group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return g;
  throw std::invalid_argument("problem has no variable group " + name);
}

RMat embed_real(const CMat& m) {
  const long n = m.rows();
  RMat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = m.real();
  r.topRightCorner(n, n) = -m.imag();
  r.bottomLeftCorner(n, n) = m.imag();
  r.bottomRightCorner(n, n) = m.real();
  return r;
}

CMat complex_from_real(const RMat& r) {
  const long n = r.rows() / 2;
  CMat m(n, n);
  m.real() = r.topLeftCorner(n, n) + r.bottomRightCorner(n, n);
  m.imag() = r.bottomLeftCorner(n, n) - r.topRightCorner(n, n);
  return m;
}

ConicProblem complex_to_real(const HermitianProblem& hp) {
  ConicProblem p;
  for (int n : hp.block_dims) p.block_sizes.push_back(2 * n);
  p.block_names = hp.block_names;
  const long len = p.vec_length();
  std::vector<long> offs;
  for (std::size_t k = 0; k < hp.block_dims.size(); ++k) offs.push_back(p.block_offset(k));
  std::vector<Eigen::Triplet<double>> trip;
  for (long i = 0; i < hp.m(); ++i)
    for (const auto& coef : hp.a[i]) {
      const long n = hp.block_dims[coef.block];
      const long nr = 2 * n;
      const long off = offs[coef.block];
      auto put = [&](long r, long c, double v) {
        if (v != 0.0) trip.emplace_back(i, off + c * nr + r, v);
      };
      for (const auto& e : coef.entries) {
        put(e.r, e.c, e.v.real());
        put(e.r, e.c + n, -e.v.imag());
        put(e.r + n, e.c, e.v.imag());
        put(e.r + n, e.c + n, e.v.real());
      }
    }
  p.a.resize(hp.m(), len);
  p.a.setFromTriplets(trip.begin(), trip.end());
  p.c = RVec::Zero(len);
  for (std::size_t k = 0; k < hp.block_dims.size(); ++k) {
    RMat r = embed_real(hp.c[k]);
    Eigen::Map<RMat>(p.c.data() + offs[k], r.rows(), r.cols()) = r;
  }
  p.b = hp.b;
  p.offset = hp.offset;
  p.y_groups = hp.groups;
  return p;
}

std::vector<CMat> evaluate_slack(const HermitianProblem& hp, const RVec& y) {
  std::vector<CMat> s = hp.c;
  for (long i = 0; i < hp.m(); ++i) {
    if (y(i) == 0.0) continue;
    for (const auto& coef : hp.a[i])
      for (const auto& e : coef.entries) s[coef.block](e.r, e.c) -= y(i) * e.v;
  }
  return s;
}

std::vector<CMat> complex_multiplier(const HermitianProblem& hp, const ConicProblem& real, const RVec& x) {
  auto blocks = unpack_blocks(real, x);
  std::vector<CMat> out;
  for (std::size_t k = 0; k < hp.block_dims.size(); ++k) out.push_back(complex_from_real((blocks[k] + blocks[k].transpose()) / 2));
  return out;
}

SdpData SdpData::from(int n, const std::vector<int>& dims, const CMat& h, const CMat& phi) {
  SdpData s;
  s.n = n;
  s.dims = dims;
  s.d = 1;
  s.d_in = 1;
  s.d_out = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    s.d *= dims[k];
    if (k % 2 == 0) s.d_in *= dims[k];
    else s.d_out *= dims[k];
  }
  s.h = h;
  s.phi = phi;
  s.q = static_cast<int>(phi.cols());
  s.a = h.conjugate() * phi.conjugate();
  return s;
}

SdpData SdpData::from(const AveragedData& avg) { return from(avg.copies, avg.registry.dims(), avg.h, avg.phi); }

CMat dense(const SparseHerm& e, long d) {
  CMat m = CMat::Zero(d, d);
  for (const auto& x : e) m(x.r, x.c) += x.v;
  return m;
}

std::vector<CMat> hermitian_basis(int q) {
  std::vector<CMat> out;
  for (int r = 0; r < q; ++r) {
    CMat e = CMat::Zero(q, q);
    e(r, r) = 1.0;
    out.push_back(e);
  }
  for (int r = 0; r < q; ++r)
    for (int s = r + 1; s < q; ++s) {
      CMat e = CMat::Zero(q, q);
      e(r, s) = e(s, r) = 1.0;
      out.push_back(e);
    }
  for (int r = 0; r < q; ++r)
    for (int s = r + 1; s < q; ++s) {
      CMat e = CMat::Zero(q, q);
      e(r, s) = cd(0, 1);
      e(s, r) = cd(0, -1);
      out.push_back(e);
    }
  return out;
}

CMat hermitian_from_coords(const RVec& y, int q) {
  auto basis = hermitian_basis(q);
  if (y.size() != static_cast<long>(basis.size())) throw std::invalid_argument("hermitian_from_coords: wrong length");
  CMat m = CMat::Zero(q, q);
  for (std::size_t k = 0; k < basis.size(); ++k) m += y(static_cast<long>(k)) * basis[k];
  return m;
}

namespace {

struct UnionFind {
  std::vector<long> p;
  explicit UnionFind(long n) : p(n) { std::iota(p.begin(), p.end(), 0L); }
  long find(long x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(long a, long b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

using SparseReal = std::map<long, double>;  // unit -> value

// Independent columns of a set of sparse real vectors over the given units.
std::vector<std::size_t> independent(const std::vector<SparseReal>& vecs, const std::vector<long>& units, double tol = 1e-10) {
  if (vecs.empty()) return {};
  std::map<long, long> pos;
  for (std::size_t i = 0; i < units.size(); ++i) pos[units[i]] = static_cast<long>(i);
  RMat m = RMat::Zero(static_cast<long>(units.size()), static_cast<long>(vecs.size()));
  for (std::size_t j = 0; j < vecs.size(); ++j)
    for (const auto& [u, v] : vecs[j]) m(pos.at(u), static_cast<long>(j)) = v;
  Eigen::ColPivHouseholderQR<RMat> qr(m);
  qr.setThreshold(tol);
  const long r = qr.rank();
  std::vector<std::size_t> sel;
  for (long k = 0; k < r; ++k) sel.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()(k)));
  std::sort(sel.begin(), sel.end());
  return sel;
}

SparseHerm to_herm(const std::map<std::pair<int, int>, cd>& m) {
  SparseHerm out;
  double nrm = 0;
  for (const auto& [rc, v] : m) nrm += std::norm(v);
  nrm = std::sqrt(nrm);
  for (const auto& [rc, v] : m)
    if (std::abs(v) > 1e-14 * nrm) out.push_back({rc.first, rc.second, v / nrm});
  return out;
}

HermBasis basis_of_range(const MapTerms& terms, std::span<const int> dims, bool complement) {
  long d = 1;
  for (int x : dims) d *= x;
  const long nu = d * d;
  std::vector<SparseReal> image(nu);
  UnionFind uf(nu);
  for (long a = 0; a < d; ++a)
    for (long b = 0; b < d; ++b) {
      const long u = a * d + b;
      auto img = unit_image(terms, dims, a, b);
      SparseReal s;
      for (std::size_t k = 0; k < img.unit.size(); ++k) s[img.unit[k]] += img.coef[k];
      if (complement) {
        for (auto& [k, v] : s) v = -v;
        s[u] += 1.0;
      }
      for (auto it = s.begin(); it != s.end();) {
        if (std::abs(it->second) < 1e-15) it = s.erase(it);
        else ++it;
      }
      for (const auto& [k, v] : s) uf.unite(u, k);
      image[u] = std::move(s);
    }
  std::map<long, std::vector<long>> comps;
  for (long u = 0; u < nu; ++u) comps[uf.find(u)].push_back(u);

  HermBasis out;
  out.d = d;
  auto transpose_unit = [d](long u) { return (u % d) * d + u / d; };
  for (const auto& [root, units] : comps) {
    const long troot = uf.find(transpose_unit(units.front()));
    if (troot < root) continue;  // handled with its transpose partner
    std::vector<SparseReal> cols;
    for (long u : units)
      if (!image[u].empty()) cols.push_back(image[u]);
    auto sel = independent(cols, units);
    if (sel.empty()) continue;
    if (troot != root) {
      for (std::size_t j : sel) {
        std::map<std::pair<int, int>, cd> h1, h2;
        for (const auto& [u, v] : cols[j]) {
          int r = static_cast<int>(u / d), c = static_cast<int>(u % d);
          h1[{r, c}] += v;
          h1[{c, r}] += v;
          h2[{r, c}] += cd(0, v);
          h2[{c, r}] += cd(0, -v);
        }
        out.elems.push_back(to_herm(h1));
        out.elems.push_back(to_herm(h2));
      }
      continue;
    }
    std::vector<SparseReal> symv, anti;
    for (std::size_t j : sel) {
      SparseReal s, a;
      for (const auto& [u, v] : cols[j]) {
        long t = transpose_unit(u);
        s[u] += v / 2;
        s[t] += v / 2;
        a[u] += v / 2;
        a[t] -= v / 2;
      }
      symv.push_back(s);
      anti.push_back(a);
    }
    for (std::size_t j : independent(symv, units)) {
      std::map<std::pair<int, int>, cd> h;
      for (const auto& [u, v] : symv[j]) h[{static_cast<int>(u / d), static_cast<int>(u % d)}] += v;
      out.elems.push_back(to_herm(h));
    }
    for (std::size_t j : independent(anti, units)) {
      std::map<std::pair<int, int>, cd> h;
      for (const auto& [u, v] : anti[j]) h[{static_cast<int>(u / d), static_cast<int>(u % d)}] += cd(0, v);
      out.elems.push_back(to_herm(h));
    }
  }
  return out;
}

cd trace_of(const SparseHerm& e) {
  cd t = 0;
  for (const auto& x : e)
    if (x.r == x.c) t += x.v;
  return t;
}

}  // namespace

HermBasis fixed_space_basis(const MapTerms& terms, std::span<const int> dims, bool traceless) {
  HermBasis b = basis_of_range(terms, dims, false);
  if (!traceless) return b;
  std::size_t piv = b.elems.size();
  double best = 0;
  for (std::size_t k = 0; k < b.elems.size(); ++k) {
    double t = std::abs(trace_of(b.elems[k]));
    if (t > best) {
      best = t;
      piv = k;
    }
  }
  if (piv == b.elems.size()) return b;
  const SparseHerm p = b.elems[piv];
  const cd tp = trace_of(p);
  HermBasis out;
  out.d = b.d;
  for (std::size_t k = 0; k < b.elems.size(); ++k) {
    if (k == piv) continue;
    const cd t = trace_of(b.elems[k]);
    if (std::abs(t) < 1e-12) {
      out.elems.push_back(b.elems[k]);
      continue;
    }
    std::map<std::pair<int, int>, cd> m;
    for (const auto& x : b.elems[k]) m[{x.r, x.c}] += x.v;
    const cd f = t / tp;
    for (const auto& x : p) m[{x.r, x.c}] -= f * x.v;
    out.elems.push_back(to_herm(m));
  }
  return out;
}

HermBasis kernel_basis(const MapTerms& terms, std::span<const int> dims) { return basis_of_range(terms, dims, true); }

namespace {

// Accumulates one coordinate's coefficient matrices.
struct CoefSet {
  std::map<int, std::map<std::pair<int, int>, cd>> blocks;
  void add(int blk, int r, int c, cd v) {
    if (v != 0.0) blocks[blk][{r, c}] += v;
  }
  // Places herm at (off, off) of block blk with factor s.
  void add_herm(int blk, long off, const SparseHerm& h, cd s) {
    for (const auto& e : h) add(blk, static_cast<int>(off + e.r), static_cast<int>(off + e.c), s * e.v);
  }
  void add_dense_herm(int blk, long off, const CMat& h, cd s) {
    for (long i = 0; i < h.rows(); ++i)
      for (long j = 0; j < h.cols(); ++j) add(blk, static_cast<int>(off + i), static_cast<int>(off + j), s * h(i, j));
  }
  // Places g (rows x cols) at rows [row_off, ...) and cols [0, ...), plus its adjoint.
  void add_offdiag(int blk, long row_off, const CMat& g, cd s) {
    for (long i = 0; i < g.rows(); ++i)
      for (long j = 0; j < g.cols(); ++j) {
        cd v = s * g(i, j);
        add(blk, static_cast<int>(row_off + i), static_cast<int>(j), v);
        add(blk, static_cast<int>(j), static_cast<int>(row_off + i), std::conj(v));
      }
  }
  std::vector<HermCoef> finish() const {
    std::vector<HermCoef> out;
    for (const auto& [blk, m] : blocks) {
      HermCoef c;
      c.block = blk;
      for (const auto& [rc, v] : m)
        if (v != 0.0) c.entries.push_back({rc.first, rc.second, v});
      out.push_back(std::move(c));
    }
    return out;
  }
};

struct ProblemAssembler {
  HermitianProblem hp;
  std::vector<double> b;

  int add_block(const std::string& name, int n) {
    hp.block_dims.push_back(n);
    hp.block_names.push_back(name);
    hp.c.push_back(CMat::Zero(n, n));
    return static_cast<int>(hp.block_dims.size()) - 1;
  }
  void begin_group(const std::string& name) { hp.groups.push_back({name, hp.m(), 0}); }
  // The coordinate enters the slack as +y * placement, so A_i = -placement.
  void add_coord(const CoefSet& placement, double bval) {
    auto coefs = placement.finish();
    for (auto& c : coefs)
      for (auto& e : c.entries) e.v = -e.v;
    hp.a.push_back(std::move(coefs));
    b.push_back(bval);
    hp.groups.back().count++;
  }
  HermitianProblem done() {
    hp.b = Eigen::Map<RVec>(b.data(), static_cast<long>(b.size()));
    return std::move(hp);
  }
};

double fro_norm(const CMat& m) { return m.norm(); }

// Basis of {G (q x r) : G psi Hermitian} for psi (r x q).
std::vector<CMat> hermitian_product_subspace(const CMat& psi) {
  const long r = psi.rows(), q = psi.cols();
  Eigen::ColPivHouseholderQR<CMat> rank_qr(psi);
  rank_qr.setThreshold(1e-10);
  if (rank_qr.rank() == q) {
    // Structured basis: K psi^+ with K Hermitian, plus rows orthogonal to range(psi).
    std::vector<CMat> out;
    CMat ppinv = pinv(psi);
    for (const auto& e : hermitian_basis(static_cast<int>(q))) {
      CMat g = e * ppinv;
      out.push_back(g / fro_norm(g));
    }
    Eigen::HouseholderQR<CMat> qr(psi);
    CMat qfull = qr.householderQ() * CMat::Identity(r, r);
    for (long t = q; t < r; ++t) {
      CVec u = qfull.col(t);
      for (long row = 0; row < q; ++row) {
        CMat g = CMat::Zero(q, r);
        g.row(row) = u.adjoint();
        out.push_back(g);
        out.push_back(cd(0, 1) * g);
      }
    }
    return out;
  }
  const long nun = 2 * q * r;
  RMat cons = RMat::Zero(q * q, nun);
  for (long k = 0; k < nun; ++k) {
    CMat g = CMat::Zero(q, r);
    g((k / 2) / r, (k / 2) % r) = (k % 2 == 0) ? cd(1, 0) : cd(0, 1);
    CMat kk = g * psi;
    CMat anti = kk - kk.adjoint();
    long row = 0;
    for (long a = 0; a < q; ++a) {
      cons(row++, k) = anti(a, a).imag();
      for (long b2 = a + 1; b2 < q; ++b2) {
        cons(row++, k) = anti(a, b2).real();
        cons(row++, k) = anti(a, b2).imag();
      }
    }
  }
  Eigen::JacobiSVD<RMat> svd(cons, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  long rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  std::vector<CMat> out;
  for (long k = rank; k < nun; ++k) {
    RVec v = svd.matrixV().col(k);
    CMat g(q, r);
    for (long i = 0; i < q; ++i)
      for (long j = 0; j < r; ++j) g(i, j) = cd(v(2 * (i * r + j)), v(2 * (i * r + j) + 1));
    out.push_back(g);
  }
  return out;
}

// tr(A G) for A (d x q) and G (q x d).
cd trace_product(const CMat& a, const CMat& g) { return (a.transpose().cwiseProduct(g)).sum(); }

void add_b_and_c(ProblemAssembler& as, const std::vector<int>& blocks, long d, int q, const std::vector<CMat>& bbasis,
                 const CMat& amat, const CMat* right) {
  as.begin_group("b");
  for (const auto& g : bbasis) {
    CoefSet cs;
    for (int blk : blocks) cs.add_offdiag(blk, d, g, 1.0);
    CMat gfull = right ? CMat(g * right->adjoint()) : g;
    as.add_coord(cs, -4.0 * trace_product(amat, gfull).real());
  }
  as.begin_group("c");
  for (const auto& e : hermitian_basis(q)) {
    CoefSet cs;
    for (int blk : blocks) cs.add_dense_herm(blk, d, e, 1.0);
    as.add_coord(cs, -e.trace().real());
  }
}

}  // namespace

BuiltProblem build_primal(const StrategyClass& k, const SdpData& data) {
  const long d = data.d;
  const int q = data.q;
  ProblemAssembler as;
  BuiltProblem bp;
  bp.form = ProblemForm::primal;
  bp.k = k;
  bp.d = d;
  bp.d_out = data.d_out;
  bp.q = q;
  const int main = as.add_block("main", static_cast<int>(d + q));
  const double x0 = static_cast<double>(data.d_out) / static_cast<double>(d);
  as.hp.c[main].topLeftCorner(d, d) = x0 * CMat::Identity(d, d);
  if (k.kind == StrategyKind::causal_superposition) {
    auto terms = superposition_terms(data.n);
    const int b1 = as.add_block("x1", static_cast<int>(d));
    const int b2 = as.add_block("x2", static_cast<int>(d));
    as.hp.c[b1] = (x0 / 2) * CMat::Identity(d, d);
    as.hp.c[b2] = (x0 / 2) * CMat::Identity(d, d);
    const int blk[2] = {b1, b2};
    for (int s = 0; s < 2; ++s) {
      as.begin_group(s == 0 ? "xt1" : "xt2");
      for (const auto& f : fixed_space_basis(terms[s], data.dims, true).elems) {
        CoefSet cs;
        cs.add_herm(main, 0, f, 1.0);
        cs.add_herm(blk[s], 0, f, 1.0);
        as.add_coord(cs, 0.0);
      }
    }
    as.begin_group("t");
    CoefSet ct;
    for (long i = 0; i < d; ++i) {
      ct.add(b1, static_cast<int>(i), static_cast<int>(i), 1.0 / static_cast<double>(d));
      ct.add(b2, static_cast<int>(i), static_cast<int>(i), -1.0 / static_cast<double>(d));
    }
    as.add_coord(ct, 0.0);
  } else {
    as.begin_group("xt");
    for (const auto& f : fixed_space_basis(lambda_terms(k, data.n), data.dims, true).elems) {
      CoefSet cs;
      cs.add_herm(main, 0, f, 1.0);
      as.add_coord(cs, 0.0);
    }
  }
  add_b_and_c(as, {main}, d, q, hermitian_product_subspace(data.phi.conjugate()), data.a, nullptr);
  bp.herm = as.done();
  bp.real = complex_to_real(bp.herm);
  return bp;
}

BuiltProblem build_dual(const StrategyClass& k, const SdpData& data) {
  const long d = data.d;
  const int q = data.q;
  ProblemAssembler as;
  BuiltProblem bp;
  bp.form = ProblemForm::dual;
  bp.k = k;
  bp.d = d;
  bp.d_out = data.d_out;
  bp.q = q;
  const bool sup = k.kind == StrategyKind::causal_superposition;
  std::vector<int> blocks;
  blocks.push_back(as.add_block(sup ? "main1" : "main", static_cast<int>(d + q)));
  if (sup) blocks.push_back(as.add_block("main2", static_cast<int>(d + q)));
  for (int blk : blocks) {
    CMat& c = as.hp.c[blk];
    c.topRightCorner(d, q) = 2.0 * data.a;
    c.bottomLeftCorner(q, d) = 2.0 * data.a.adjoint();
    c.bottomRightCorner(q, q) = CMat::Identity(q, q);
  }
  as.begin_group("lambda");
  {
    CoefSet cs;
    for (int blk : blocks)
      for (long i = 0; i < d; ++i) cs.add(blk, static_cast<int>(i), static_cast<int>(i), 1.0 / static_cast<double>(data.d_out));
    as.add_coord(cs, -1.0);
  }
  if (sup) {
    auto terms = superposition_terms(data.n);
    for (int s = 0; s < 2; ++s) {
      as.begin_group(s == 0 ? "yt1" : "yt2");
      for (const auto& g : kernel_basis(terms[s], data.dims).elems) {
        CoefSet cs;
        cs.add_herm(blocks[s], 0, g, 1.0);
        as.add_coord(cs, 0.0);
      }
    }
  } else {
    as.begin_group("yt");
    for (const auto& g : kernel_basis(lambda_terms(k, data.n), data.dims).elems) {
      CoefSet cs;
      cs.add_herm(blocks[0], 0, g, 1.0);
      as.add_coord(cs, 0.0);
    }
  }
  as.begin_group("h");
  const CMat phis = data.phi.conjugate();
  for (const auto& e : hermitian_basis(q)) {
    CoefSet cs;
    // slack top-right gains -2i Phi* h
    CMat top = cd(0, -2) * phis * e;
    for (int blk : blocks) cs.add_offdiag(blk, d, top.adjoint(), 1.0);
    as.add_coord(cs, 0.0);
  }
  bp.herm = as.done();
  bp.real = complex_to_real(bp.herm);
  return bp;
}

BuiltProblem build_inner(const CMat& xt, const SdpData& data) {
  const long d = data.d;
  const int q = data.q;
  if (xt.rows() != d) throw std::invalid_argument("build_inner: tester has the wrong dimension");
  auto eig = herm_eig(xt);
  if (eig.values.minCoeff() < -1e-8 * std::max(1.0, eig.values(0)))
    throw std::invalid_argument("build_inner: tester is not positive semidefinite");
  const double cut = 1e-10 * std::max(eig.values(0), 0.0);
  long r = 0;
  while (r < d && eig.values(r) > cut) ++r;
  CMat v = eig.vectors.leftCols(r);
  ProblemAssembler as;
  BuiltProblem bp;
  bp.form = ProblemForm::inner;
  bp.d = d;
  bp.d_out = data.d_out;
  bp.q = q;
  bp.inner_support = v;
  const int main = as.add_block("main", static_cast<int>(r + q));
  as.hp.c[main].topLeftCorner(r, r) = eig.values.head(r).cast<cd>().asDiagonal();
  CMat psi = v.adjoint() * data.phi.conjugate();
  add_b_and_c(as, {main}, r, q, hermitian_product_subspace(psi), data.a, &v);
  bp.herm = as.done();
  bp.real = complex_to_real(bp.herm);
  return bp;
}

double primal_objective(const PrimalWitness& w, const SdpData& data) {
  return -w.c.trace().real() - 4.0 * trace_product(data.a, w.b).real();
}

PrimalWitness primal_from_y(const BuiltProblem& bp, const RVec& y, const SdpData& data) {
  if (bp.form != ProblemForm::primal) throw std::invalid_argument("primal_from_y: expects the primal formulation");
  auto s = evaluate_slack(bp.herm, y);
  const long d = bp.d;
  PrimalWitness w;
  w.xt = hermitian_part(s[0].topLeftCorner(d, d));
  w.b = s[0].bottomLeftCorner(bp.q, d);
  w.c = hermitian_part(s[0].bottomRightCorner(bp.q, bp.q));
  if (bp.k.kind == StrategyKind::causal_superposition) {
    w.xt1 = hermitian_part(s[1]);
    w.xt2 = hermitian_part(s[2]);
  }
  w.objective = primal_objective(w, data);
  return w;
}

PrimalWitness primal_from_multiplier(const BuiltProblem& bp, const RVec& x, const SdpData& data) {
  if (bp.form != ProblemForm::dual) throw std::invalid_argument("primal_from_multiplier: expects the dual formulation");
  auto z = complex_multiplier(bp.herm, bp.real, x);
  const long d = bp.d;
  PrimalWitness w;
  w.xt = hermitian_part(z[0].topLeftCorner(d, d));
  w.b = z[0].bottomLeftCorner(bp.q, d);
  w.c = hermitian_part(z[0].bottomRightCorner(bp.q, bp.q));
  if (bp.k.kind == StrategyKind::causal_superposition) {
    w.xt1 = w.xt;
    w.xt2 = hermitian_part(z[1].topLeftCorner(d, d));
    w.xt = w.xt1 + w.xt2;
    w.b += z[1].bottomLeftCorner(bp.q, d);
    w.c += hermitian_part(z[1].bottomRightCorner(bp.q, bp.q));
  }
  w.objective = primal_objective(w, data);
  return w;
}

DualWitness dual_from_y(const BuiltProblem& bp, const RVec& y, const SdpData& data) {
  if (bp.form != ProblemForm::dual) throw std::invalid_argument("dual_from_y: expects the dual formulation");
  auto s = evaluate_slack(bp.herm, y);
  const long d = bp.d;
  DualWitness w;
  w.lambda = y(bp.herm.group("lambda").begin);
  const CMat shift = (w.lambda / static_cast<double>(data.d_out)) * CMat::Identity(d, d);
  const auto& hg = bp.herm.group("h");
  w.h = hermitian_from_coords(y.segment(hg.begin, hg.count), bp.q);
  if (bp.k.kind == StrategyKind::causal_superposition) {
    w.yt1 = hermitian_part(s[0].topLeftCorner(d, d)) - shift;
    w.yt2 = hermitian_part(s[1].topLeftCorner(d, d)) - shift;
  } else {
    w.yt = hermitian_part(s[0].topLeftCorner(d, d)) - shift;
  }
  return w;
}

DualWitness dual_from_multiplier(const BuiltProblem& bp, const RVec& x, const SdpData& data) {
  if (bp.form != ProblemForm::primal) throw std::invalid_argument("dual_from_multiplier: expects the primal formulation");
  auto z = complex_multiplier(bp.herm, bp.real, x);
  const long d = bp.d;
  const double dd = static_cast<double>(d), dout = static_cast<double>(data.d_out);
  DualWitness w;
  CMat wtl = hermitian_part(z[0].topLeftCorner(d, d));
  CMat z12 = z[0].topRightCorner(d, bp.q);
  const CMat phis = data.phi.conjugate();
  CMat hs = pinv(phis) * (2.0 * data.a - z12) / cd(0, 2);
  w.h = hermitian_part(hs);
  if (bp.k.kind == StrategyKind::causal_superposition) {
    CMat w1 = wtl + hermitian_part(z[1]);
    CMat w2 = wtl + hermitian_part(z[2]);
    const double c = (w1.trace().real() + w2.trace().real()) / (2 * dd);
    w.lambda = dout * c;
    w.yt1 = w1 - c * CMat::Identity(d, d);
    w.yt2 = w2 - c * CMat::Identity(d, d);
  } else {
    const double c = wtl.trace().real() / dd;
    w.lambda = dout * c;
    w.yt = wtl - c * CMat::Identity(d, d);
  }
  return w;
}

CMat build_omega(const CMat& h_small, const SdpData& data) {
  CMat k = data.a - cd(0, 1) * data.phi.conjugate() * h_small;
  return 4.0 * k * k.adjoint();
}

double inner_value_lsq(const CMat& xt, const SdpData& data) {
  auto eig = herm_eig(xt);
  RVec sq = eig.values.cwiseMax(0.0).cwiseSqrt();
  CMat w = eig.vectors * sq.asDiagonal() * eig.vectors.adjoint();
  CMat target = w * data.a;
  const CMat phis = data.phi.conjugate();
  auto basis = hermitian_basis(data.q);
  const long rows = 2 * target.size();
  RMat m(rows, static_cast<long>(basis.size()));
  RVec rhs(rows);
  auto flatten = [](const CMat& x, RVec& out, long) {
    long k = 0;
    for (long j = 0; j < x.cols(); ++j)
      for (long i = 0; i < x.rows(); ++i) {
        out(k++) = x(i, j).real();
        out(k++) = x(i, j).imag();
      }
  };
  flatten(target, rhs, 0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    CMat col = cd(0, 1) * w * phis * basis[k];
    RVec v(rows);
    flatten(col, v, 0);
    m.col(static_cast<long>(k)) = v;
  }
  Eigen::CompleteOrthogonalDecomposition<RMat> cod(m);
  RVec y = cod.solve(rhs);
  return 4.0 * (rhs - m * y).squaredNorm();
}

Decomposition superposition_decomposition(const CMat& xt, int n, const SolverConfig& cfg) {
  auto terms = superposition_terms(n);
  const long d = xt.rows();
  std::vector<int> dims(2 * n, static_cast<int>(std::lround(std::pow(static_cast<double>(d), 1.0 / (2 * n)))));
  auto f1 = fixed_space_basis(terms[0], dims, true).elems;
  std::vector<CMat> f1d;
  for (const auto& e : f1) f1d.push_back(dense(e, d));
  f1d.push_back(CMat::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  auto comp = [&](const CMat& x) { return CMat(x - apply_terms(terms[1], x, dims)); };
  auto flatten = [](const CMat& x) {
    RVec v(2 * x.size());
    for (long k = 0; k < x.size(); ++k) {
      v(2 * k) = x.data()[k].real();
      v(2 * k + 1) = x.data()[k].imag();
    }
    return v;
  };
  const long nf = static_cast<long>(f1d.size());
  RMat m(2 * d * d, nf);
  for (long k = 0; k < nf; ++k) m.col(k) = flatten(comp(f1d[k]));
  RVec rhs = flatten(comp(xt));
  Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeFullV);
  RVec alpha = svd.solve(rhs);
  Decomposition out;
  out.linear_residual = (m * alpha - rhs).cwiseAbs().maxCoeff();
  CMat x1 = CMat::Zero(d, d);
  for (long k = 0; k < nf; ++k) x1 += alpha(k) * f1d[k];
  const auto& s = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  long rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  std::vector<CMat> dirs;
  for (long k = rank; k < nf; ++k) {
    CMat nd = CMat::Zero(d, d);
    for (long j = 0; j < nf; ++j) nd += svd.matrixV()(j, k) * f1d[j];
    dirs.push_back(hermitian_part(nd));
  }
  ProblemAssembler as;
  const int b1 = as.add_block("x1", static_cast<int>(d));
  const int b2 = as.add_block("x2", static_cast<int>(d));
  as.hp.c[b1] = hermitian_part(x1);
  as.hp.c[b2] = hermitian_part(xt - x1);
  as.begin_group("beta");
  for (const auto& nd : dirs) {
    CoefSet cs;
    cs.add_dense_herm(b1, 0, nd, 1.0);
    cs.add_dense_herm(b2, 0, nd, -1.0);
    as.add_coord(cs, 0.0);
  }
  as.begin_group("t");
  CoefSet ct;
  for (long i = 0; i < d; ++i) {
    ct.add(b1, static_cast<int>(i), static_cast<int>(i), -1.0);
    ct.add(b2, static_cast<int>(i), static_cast<int>(i), -1.0);
  }
  as.add_coord(ct, 1.0);
  HermitianProblem hp = as.done();
  ConicProblem cp = complex_to_real(hp);
  auto res = solve_sdp(cp, cfg);
  if (!res.ok()) return out;
  auto s2 = evaluate_slack(hp, res.y);
  out.margin = res.y(hp.group("t").begin);
  out.x1 = s2[0] + out.margin * CMat::Identity(d, d);
  out.x2 = s2[1] + out.margin * CMat::Identity(d, d);
  return out;
}

}  // namespace globest

#include "globest/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "globest/kernels.hpp"

namespace globest {

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::near_optimal: return "near_optimal";
    case SolverStatus::primal_infeasible: return "primal_infeasible";
    case SolverStatus::dual_infeasible: return "dual_infeasible";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::numerical: return "numerical";
  }
  return "";
}

namespace {

using Blocks = std::vector<RMat>;

struct Model {
  std::vector<int> n;  // block sizes, free variables split into pairs of 1x1 blocks
  std::vector<kernels::Constraint> a;
  Blocks c;
  RVec b;
  long nblocks_orig = 0;
  long nfree = 0;
};

Model build_model(const ConicProblem& p) {
  p.validate();
  Model md;
  md.nblocks_orig = static_cast<long>(p.block_sizes.size());
  md.nfree = p.free_count;
  md.n = p.block_sizes;
  for (long k = 0; k < p.free_count; ++k) {
    md.n.push_back(1);
    md.n.push_back(1);
  }
  std::vector<long> offs;
  for (std::size_t k = 0; k < p.block_sizes.size(); ++k) offs.push_back(p.block_offset(k));
  auto locate = [&](long col, int& blk, int& r, int& c) {
    long k = std::upper_bound(offs.begin(), offs.end(), col) - offs.begin() - 1;
    long local = col - offs[k];
    blk = static_cast<int>(k);
    r = static_cast<int>(local % p.block_sizes[k]);
    c = static_cast<int>(local / p.block_sizes[k]);
  };
  md.a.resize(p.m());
  for (long i = 0; i < p.m(); ++i) {
    std::map<int, std::map<std::pair<int, int>, double>> acc;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.a, i); it; ++it) {
      long col = it.col();
      double v = it.value();
      if (col < p.free_count) {
        int bp = static_cast<int>(md.nblocks_orig + 2 * col);
        acc[bp][{0, 0}] += v;
        acc[bp + 1][{0, 0}] -= v;
        continue;
      }
      int blk, r, c;
      locate(col, blk, r, c);
      acc[blk][{r, c}] += v / 2;
      acc[blk][{c, r}] += v / 2;
    }
    for (auto& [blk, ent] : acc) {
      kernels::BlockEntries e;
      e.block = blk;
      for (auto& [rc, v] : ent)
        if (v != 0.0) {
          e.row.push_back(rc.first);
          e.col.push_back(rc.second);
          e.val.push_back(v);
        }
      if (e.val.empty()) continue;
      kernels::finalize_columns(e);
      md.a[i].push_back(std::move(e));
    }
  }
  for (std::size_t k = 0; k < p.block_sizes.size(); ++k) {
    const long nk = p.block_sizes[k];
    RMat cb = Eigen::Map<const RMat>(p.c.data() + offs[k], nk, nk);
    md.c.push_back((cb + cb.transpose()) / 2);
  }
  for (long k = 0; k < p.free_count; ++k) {
    md.c.push_back(RMat::Constant(1, 1, p.c(k)));
    md.c.push_back(RMat::Constant(1, 1, -p.c(k)));
  }
  md.b = p.b;
  return md;
}

double inner(const Blocks& u, const Blocks& v) {
  double s = 0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k].cwiseProduct(v[k]).sum();
  return s;
}

double fro(const Blocks& u) { return std::sqrt(inner(u, u)); }

RVec apply_a(const Model& md, const Blocks& x) {
  RVec out = RVec::Zero(md.b.size());
  for (std::size_t i = 0; i < md.a.size(); ++i) {
    double s = 0;
    for (const auto& e : md.a[i]) {
      const RMat& xb = x[e.block];
      for (std::size_t p = 0; p < e.val.size(); ++p) s += e.val[p] * xb(e.row[p], e.col[p]);
    }
    out(i) = s;
  }
  return out;
}

Blocks apply_at(const Model& md, const RVec& y) {
  Blocks out;
  for (int nk : md.n) out.push_back(RMat::Zero(nk, nk));
  for (std::size_t i = 0; i < md.a.size(); ++i) {
    if (y(i) == 0.0) continue;
    for (const auto& e : md.a[i])
      for (std::size_t p = 0; p < e.val.size(); ++p) out[e.block](e.row[p], e.col[p]) += y(i) * e.val[p];
  }
  return out;
}

Blocks combine(const Blocks& u, double a, const Blocks& v) {
  Blocks out = u;
  for (std::size_t k = 0; k < u.size(); ++k) out[k] += a * v[k];
  return out;
}

RMat sym(const RMat& m) { return (m + m.transpose()) / 2; }

// Largest alpha with x + alpha dx PSD (capped at a large value).
double max_step(const Blocks& x, const Blocks& dx) {
  double alpha = 1e30;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const long n = x[k].rows();
    double lmin;
    if (n == 1) {
      lmin = dx[k](0, 0) / x[k](0, 0);
    } else {
      Eigen::LLT<RMat> llt(x[k]);
      if (llt.info() != Eigen::Success) return 0.0;
      RMat w = llt.matrixL().solve(dx[k]);
      w = llt.matrixL().solve(w.transpose()).transpose();
      Eigen::SelfAdjointEigenSolver<RMat> es(sym(w), Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues()(0);
    }
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

bool inverse_spd(const Blocks& z, Blocks& zinv) {
  zinv.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    Eigen::LLT<RMat> llt(z[k]);
    if (llt.info() != Eigen::Success) return false;
    zinv[k] = llt.solve(RMat::Identity(z[k].rows(), z[k].cols()));
    zinv[k] = sym(zinv[k]);
  }
  return true;
}

struct Factor {
  Eigen::LLT<RMat> llt;
  RMat m;
  bool ok = false;
};

void factor_schur(Factor& f) {
  f.llt.compute(f.m);
  if (f.llt.info() == Eigen::Success) {
    f.ok = true;
    return;
  }
  const double scale = std::max(1.0, f.m.diagonal().cwiseAbs().maxCoeff());
  for (double reg = 1e-12; reg <= 1e-6; reg *= 100) {
    RMat mr = f.m;
    mr.diagonal().array() += reg * scale;
    f.llt.compute(mr);
    if (f.llt.info() == Eigen::Success) {
      f.ok = true;
      return;
    }
  }
  f.ok = false;
}

RVec solve_schur(const Factor& f, const RVec& rhs) {
  RVec dy = f.llt.solve(rhs);
  RVec r = rhs - f.m * dy;
  dy += f.llt.solve(r);
  return dy;
}

}  // namespace

SolverResult InteriorPointBackend::solve(const ConicProblem& p, const SolverConfig& cfg) const {
  kernels::FlushDenormals ftz;
  Model md = build_model(p);
  const std::size_t nb = md.n.size();
  const long m = md.b.size();
  long ntot = 0;
  for (int nk : md.n) ntot += nk;

  // Infeasible starting point scaled to the data.
  std::vector<double> anorm_blk(nb, 0.0);
  std::vector<double> ratio_blk(nb, 0.0);
  for (long i = 0; i < m; ++i)
    for (const auto& e : md.a[i]) {
      double f2 = 0;
      for (double v : e.val) f2 += v * v;
      double f = std::sqrt(f2);
      anorm_blk[e.block] = std::max(anorm_blk[e.block], f);
      ratio_blk[e.block] = std::max(ratio_blk[e.block], (1 + std::abs(md.b(i))) / (1 + f));
    }
  Blocks x, z;
  for (std::size_t k = 0; k < nb; ++k) {
    const double nk = md.n[k];
    double xi = std::max({10.0, std::sqrt(nk), nk * ratio_blk[k]});
    double eta = std::max({10.0, std::sqrt(nk), anorm_blk[k], md.c[k].norm()});
    x.push_back(xi * RMat::Identity(md.n[k], md.n[k]));
    z.push_back(eta * RMat::Identity(md.n[k], md.n[k]));
  }
  RVec y = RVec::Zero(m);

  const double bnorm = md.b.norm();
  const double cnorm = fro(md.c);
  SolverResult res;
  res.status = SolverStatus::max_iter;

  struct Best {
    double score = 1e300;
    Blocks x, z;
    RVec y;
    double pobj = 0, dobj = 0, gap = 0, pinf = 0, dinf = 0;
  } best;

  int stall = 0;
  double progress_ref = 1e300;
  int since_progress = 0;
  Factor fac;
  int it = 0;
  for (; it <= cfg.max_iter; ++it) {
    RVec rp = md.b - apply_a(md, x);
    Blocks aty = apply_at(md, y);
    Blocks rd(nb);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = md.c[k] - z[k] - aty[k];
    const double pobj = inner(md.c, x) + p.offset;
    const double dobj = md.b.dot(y) + p.offset;
    const double xz = inner(x, z);
    const double mu = xz / static_cast<double>(ntot);
    const double gap = std::max(xz, std::abs(pobj - dobj)) / (1 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1 + bnorm);
    const double dinf = fro(rd) / (1 + cnorm);
    const double score = std::max({gap / cfg.gap_tol, pinf / cfg.feas_tol, dinf / cfg.feas_tol});
    if (score < best.score) best = {score, x, z, y, pobj, dobj, gap, pinf, dinf};
    if (score < 0.7 * progress_ref) {
      progress_ref = score;
      since_progress = 0;
    } else if (++since_progress >= 8) {
      res.message = "no further progress";
      break;
    }
    if (cfg.verbose)
      std::fprintf(stderr, "it %3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e mu %.2e\n", it, pobj, dobj, gap,
                   pinf, dinf, mu);
    if (gap < cfg.gap_tol && pinf < cfg.feas_tol && dinf < cfg.feas_tol) {
      res.status = SolverStatus::optimal;
      break;
    }
    // Infeasibility certificates from diverging iterates.
    const double by = md.b.dot(y);
    const double aty_z = fro(combine(aty, 1.0, z));
    if (by > 0 && by > 1e8 * aty_z && fro(z) > 1e6) {
      res.status = SolverStatus::primal_infeasible;
      res.message = "dual ray found";
      break;
    }
    const double cx = inner(md.c, x);
    const double ax = apply_a(md, x).norm();
    if (cx < 0 && -cx > 1e8 * ax && fro(x) > 1e6) {
      res.status = SolverStatus::dual_infeasible;
      res.message = "primal ray found";
      break;
    }
    if (it == cfg.max_iter) break;

    Blocks zinv;
    if (!inverse_spd(z, zinv)) {
      res.status = SolverStatus::numerical;
      res.message = "dual slack lost definiteness";
      break;
    }
    if (cfg.parallel) kernels::schur_parallel(md.a, x, zinv, fac.m);
    else kernels::schur_serial(md.a, x, zinv, fac.m);
    factor_schur(fac);
    if (!fac.ok) {
      res.status = SolverStatus::numerical;
      res.message = "Schur complement factorization failed";
      break;
    }

    Blocks xrz(nb);
    for (std::size_t k = 0; k < nb; ++k) xrz[k] = x[k] * rd[k] * zinv[k];
    const RVec a_xrz = apply_a(md, xrz);

    auto direction = [&](const Blocks& g, Blocks& dx, RVec& dy, Blocks& dz) {
      RVec rhs = rp - apply_a(md, g) + a_xrz;
      dy = solve_schur(fac, rhs);
      Blocks atdy = apply_at(md, dy);
      dz.resize(nb);
      dx.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] = rd[k] - atdy[k];
        dx[k] = g[k] - sym(x[k] * dz[k] * zinv[k]);
      }
    };

    // predictor
    Blocks g(nb);
    for (std::size_t k = 0; k < nb; ++k) g[k] = -x[k];
    Blocks dxa, dza;
    RVec dya;
    direction(g, dxa, dya, dza);
    double ap = std::min(1.0, cfg.step_fraction * max_step(x, dxa));
    double ad = std::min(1.0, cfg.step_fraction * max_step(z, dza));
    const double mu_aff = inner(combine(x, ap, dxa), combine(z, ad, dza)) / static_cast<double>(ntot);
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // corrector
    for (std::size_t k = 0; k < nb; ++k) g[k] = sigma * mu * zinv[k] - x[k] - sym(dxa[k] * dza[k] * zinv[k]);
    Blocks dx, dz;
    RVec dy;
    direction(g, dx, dy, dz);
    ap = std::min(1.0, cfg.step_fraction * max_step(x, dx));
    ad = std::min(1.0, cfg.step_fraction * max_step(z, dz));
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stall >= 3) {
        res.status = SolverStatus::numerical;
        res.message = "step length collapsed";
        break;
      }
    } else {
      stall = 0;
    }
    for (std::size_t k = 0; k < nb; ++k) {
      x[k] = sym(x[k] + ap * dx[k]);
      z[k] = sym(z[k] + ad * dz[k]);
    }
    y += ad * dy;
  }

  if (res.status == SolverStatus::max_iter || res.status == SolverStatus::numerical) {
    if (best.gap < cfg.stall_accept && best.pinf < cfg.stall_accept && best.dinf < cfg.stall_accept) {
      res.status = SolverStatus::near_optimal;
      if (res.message.empty()) res.message = "iteration limit reached";
    }
    x = best.x;
    z = best.z;
    y = best.y;
  }
  if (res.status == SolverStatus::optimal || res.status == SolverStatus::near_optimal) {
    res.primal_objective = inner(md.c, x) + p.offset;
    res.dual_objective = md.b.dot(y) + p.offset;
  } else {
    res.primal_objective = best.pobj;
    res.dual_objective = best.dobj;
  }
  RVec rp = md.b - apply_a(md, x);
  Blocks aty = apply_at(md, y);
  Blocks rd(nb);
  for (std::size_t k = 0; k < nb; ++k) rd[k] = md.c[k] - z[k] - aty[k];
  res.primal_infeasibility = rp.norm() / (1 + bnorm);
  res.dual_infeasibility = fro(rd) / (1 + cnorm);
  res.relative_gap = std::abs(res.primal_objective - res.dual_objective) /
                     (1 + std::abs(res.primal_objective) + std::abs(res.dual_objective));
  res.iterations = it;

  // Back to the caller's layout.
  RVec free_part(md.nfree);
  for (long k = 0; k < md.nfree; ++k)
    free_part(k) = x[md.nblocks_orig + 2 * k](0, 0) - x[md.nblocks_orig + 2 * k + 1](0, 0);
  Blocks xb(x.begin(), x.begin() + md.nblocks_orig);
  res.x = pack_blocks(p, free_part, xb);
  res.y = y;
  res.z = p.c - RVec(p.a.transpose() * y);
  return res;
}

SolverResult solve_sdp(const ConicProblem& p, const SolverConfig& cfg, const SdpBackend* backend) {
  static const InteriorPointBackend default_backend;
  const SdpBackend& be = backend ? *backend : default_backend;
  return be.solve(p, cfg);
}

}  // namespace globest

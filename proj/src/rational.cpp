#include "globest/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace globest {

QComplex& QComplex::operator+=(const QComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

QComplex& QComplex::operator-=(const QComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

QComplex& QComplex::operator*=(const QComplex& o) {
  mpq_class r = re * o.re - im * o.im;
  mpq_class i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
QComplex operator*(const QComplex& a, const QComplex& b) {
  QComplex r = a;
  return r *= b;
}
QComplex operator/(const QComplex& a, const QComplex& b) {
  mpq_class den = b.re * b.re + b.im * b.im;
  if (sgn(den) == 0) throw std::domain_error("division by zero");
  QComplex r = a * b.conj();
  r.re /= den;
  r.im /= den;
  return r;
}
bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }

QMat QMat::identity(long n) {
  QMat m(n, n);
  for (long i = 0; i < n; ++i) m(i, i) = QComplex(1L);
  return m;
}

QMat QMat::adjoint() const {
  QMat m(c_, r_);
  for (long i = 0; i < r_; ++i)
    for (long j = 0; j < c_; ++j) m(j, i) = (*this)(i, j).conj();
  return m;
}

QMat QMat::conjugate() const {
  QMat m(r_, c_);
  for (long i = 0; i < r_; ++i)
    for (long j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).conj();
  return m;
}

QComplex QMat::trace() const {
  QComplex t;
  for (long i = 0; i < std::min(r_, c_); ++i) t += (*this)(i, i);
  return t;
}

QMat QMat::block(long i, long j, long rows, long cols) const {
  QMat m(rows, cols);
  for (long a = 0; a < rows; ++a)
    for (long b = 0; b < cols; ++b) m(a, b) = (*this)(i + a, j + b);
  return m;
}

void QMat::set_block(long i, long j, const QMat& m) {
  for (long a = 0; a < m.rows(); ++a)
    for (long b = 0; b < m.cols(); ++b) (*this)(i + a, j + b) = m(a, b);
}

bool QMat::operator==(const QMat& o) const { return r_ == o.r_ && c_ == o.c_ && v_ == o.v_; }

static void check_same(const QMat& a, const QMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("rational matrix shape mismatch");
}

QMat operator+(const QMat& a, const QMat& b) {
  check_same(a, b);
  QMat m = a;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) m(i, j) += b(i, j);
  return m;
}

QMat operator-(const QMat& a, const QMat& b) {
  check_same(a, b);
  QMat m = a;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) m(i, j) -= b(i, j);
  return m;
}

QMat operator*(const QMat& a, const QMat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("rational matrix product shape mismatch");
  QMat m(a.rows(), b.cols());
  mpq_class t;
  for (long i = 0; i < a.rows(); ++i)
    for (long k = 0; k < a.cols(); ++k) {
      const QComplex& x = a(i, k);
      if (x.is_zero()) continue;
      const bool real = sgn(x.im) == 0;
      for (long j = 0; j < b.cols(); ++j) {
        const QComplex& y = b(k, j);
        if (y.is_zero()) continue;
        QComplex& z = m(i, j);
        if (real) {
          if (sgn(y.re) != 0) {
            t = x.re * y.re;
            z.re += t;
          }
          if (sgn(y.im) != 0) {
            t = x.re * y.im;
            z.im += t;
          }
        } else {
          z += x * y;
        }
      }
    }
  return m;
}

QMat operator*(const QComplex& s, const QMat& a) {
  QMat m(a.rows(), a.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_zero()) m(i, j) = s * a(i, j);
  return m;
}

mpq_class round_decimal(double x, int digits) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize a non-finite value");
  if (digits < 1) throw std::invalid_argument("digits must be at least 1");
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpq_class q(x);
  q *= scale;
  const bool neg = sgn(q) < 0;
  if (neg) q = -q;
  q += mpq_class(1, 2);
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (neg) n = -n;
  mpq_class out(n, scale);
  out.canonicalize();
  return out;
}

QMat rationalize(const CMat& m, int digits) {
  QMat q(m.rows(), m.cols());
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) q(i, j) = QComplex(round_decimal(m(i, j).real(), digits), round_decimal(m(i, j).imag(), digits));
  return q;
}

double to_double(const mpq_class& q) { return q.get_d(); }

CMat to_cmat(const QMat& m) {
  CMat c(m.rows(), m.cols());
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) c(i, j) = cd(m(i, j).re.get_d(), m(i, j).im.get_d());
  return c;
}

QMat hermitize(const QMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitize: matrix is not square");
  QMat h(m.rows(), m.cols());
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      QComplex v = m(i, j) + m(j, i).conj();
      v.re /= 2;
      v.im /= 2;
      h(i, j) = std::move(v);
    }
  return h;
}

bool is_hermitian(const QMat& m) {
  if (m.rows() != m.cols()) return false;
  for (long i = 0; i < m.rows(); ++i)
    for (long j = i; j < m.cols(); ++j)
      if (!(m(i, j) == m(j, i).conj())) return false;
  return true;
}

namespace {

struct GInt {
  mpz_class re, im;
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

}  // namespace

bool exact_psd(const QMat& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("exact_psd: matrix is not Hermitian");
  const long n = m.rows();
  mpz_class l = 1;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j <= i; ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).re.get_den_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).im.get_den_mpz_t());
    }
  // Lower triangle, row i holds columns 0..i.
  std::vector<std::vector<GInt>> g(n);
  for (long i = 0; i < n; ++i) {
    g[i].resize(i + 1);
    for (long j = 0; j <= i; ++j) {
      const auto& q = m(i, j);
      g[i][j].re = q.re.get_num() * (l / q.re.get_den());
      g[i][j].im = q.im.get_num() * (l / q.im.get_den());
    }
  }
  mpz_class prev = 1, t1, t2;
  for (long k = 0; k < n; ++k) {
    const mpz_class p = g[k][k].re;
    if (sgn(p) < 0) return false;
    if (sgn(p) == 0) {
      for (long i = k + 1; i < n; ++i)
        if (!g[i][k].is_zero()) return false;
      continue;
    }
    for (long i = k + 1; i < n; ++i) {
      const GInt& aik = g[i][k];
      const bool zi = aik.is_zero();
      for (long j = k + 1; j <= i; ++j) {
        GInt& x = g[i][j];
        const GInt& ajk = g[j][k];
        // x = (p x - a_ik conj(a_jk)) / prev
        x.re *= p;
        x.im *= p;
        if (!zi && !ajk.is_zero()) {
          t1 = aik.re * ajk.re + aik.im * ajk.im;
          t2 = aik.im * ajk.re - aik.re * ajk.im;
          x.re -= t1;
          x.im -= t2;
        }
        if (prev != 1) {
          mpz_divexact(x.re.get_mpz_t(), x.re.get_mpz_t(), prev.get_mpz_t());
          mpz_divexact(x.im.get_mpz_t(), x.im.get_mpz_t(), prev.get_mpz_t());
        }
      }
    }
    prev = p;
  }
  return true;
}

bool exact_psd_ldl(const QMat& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("exact_psd_ldl: matrix is not Hermitian");
  const long n = m.rows();
  QMat s = m;
  for (long k = 0; k < n; ++k) {
    const mpq_class p = s(k, k).re;
    if (sgn(p) < 0) return false;
    if (sgn(p) == 0) {
      for (long i = k + 1; i < n; ++i)
        if (!s(i, k).is_zero()) return false;
      continue;
    }
    for (long i = k + 1; i < n; ++i) {
      if (s(i, k).is_zero()) continue;
      QComplex f = s(i, k);
      f.re /= p;
      f.im /= p;
      for (long j = k + 1; j <= i; ++j) {
        if (s(j, k).is_zero()) continue;
        s(i, j) -= f * s(j, k).conj();
      }
    }
  }
  return true;
}

QMat inverse(const QMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix is not square");
  const long n = m.rows();
  QMat a = m;
  QMat inv = QMat::identity(n);
  for (long k = 0; k < n; ++k) {
    long piv = -1;
    for (long i = k; i < n; ++i)
      if (!a(i, k).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) throw std::domain_error("inverse: matrix is singular");
    if (piv != k)
      for (long j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    const QComplex pinv = QComplex(1L) / a(k, k);
    for (long j = 0; j < n; ++j) {
      a(k, j) = a(k, j) * pinv;
      inv(k, j) = inv(k, j) * pinv;
    }
    for (long i = 0; i < n; ++i) {
      if (i == k || a(i, k).is_zero()) continue;
      const QComplex f = a(i, k);
      for (long j = 0; j < n; ++j) {
        if (!a(k, j).is_zero()) a(i, j) -= f * a(k, j);
        if (!inv(k, j).is_zero()) inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

QMat left_inverse(const QMat& a) {
  QMat ad = a.adjoint();
  return inverse(ad * a) * ad;
}

std::string to_string(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_str();
}

mpq_class rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0 || sgn(q.get_den()) == 0) throw std::invalid_argument("not a rational: " + s);
    q.canonicalize();
    return q;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  const std::size_t frac = s.size() - dot - 1;
  mpz_class num;
  if (digits.empty() || digits == "-" || num.set_str(digits, 10) != 0) throw std::invalid_argument("not a decimal: " + s);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::uint64_t fnv1a(const std::vector<const QMat*>& mats) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  for (const QMat* m : mats) {
    feed(std::to_string(m->rows()) + "x" + std::to_string(m->cols()));
    for (long i = 0; i < m->rows(); ++i)
      for (long j = 0; j < m->cols(); ++j) {
        feed(to_string((*m)(i, j).re));
        feed(to_string((*m)(i, j).im));
      }
  }
  return h;
}

}  // namespace globest

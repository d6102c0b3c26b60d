#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "globest/spaces.hpp"

namespace globest {

// Gaussian rational re + i im.
struct QComplex {
  mpq_class re, im;

  QComplex() : re(0), im(0) {}
  QComplex(mpq_class r) : re(std::move(r)), im(0) {}
  QComplex(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}
  QComplex(long r) : re(r), im(0) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  QComplex conj() const { return {re, -im}; }
  QComplex& operator+=(const QComplex& o);
  QComplex& operator-=(const QComplex& o);
  QComplex& operator*=(const QComplex& o);
};

QComplex operator+(QComplex a, const QComplex& b);
QComplex operator-(QComplex a, const QComplex& b);
QComplex operator-(const QComplex& a);
QComplex operator*(const QComplex& a, const QComplex& b);
QComplex operator/(const QComplex& a, const QComplex& b);
bool operator==(const QComplex& a, const QComplex& b);

// Dense row-major matrix of Gaussian rationals.
class QMat {
 public:
  QMat() = default;
  QMat(long rows, long cols) : r_(rows), c_(cols), v_(static_cast<std::size_t>(rows * cols)) {}

  static QMat zero(long rows, long cols) { return QMat(rows, cols); }
  static QMat identity(long n);

  long rows() const { return r_; }
  long cols() const { return c_; }
  QComplex& operator()(long i, long j) { return v_[static_cast<std::size_t>(i * c_ + j)]; }
  const QComplex& operator()(long i, long j) const { return v_[static_cast<std::size_t>(i * c_ + j)]; }

  QMat adjoint() const;
  QMat conjugate() const;
  QComplex trace() const;
  QMat block(long i, long j, long rows, long cols) const;
  void set_block(long i, long j, const QMat& m);
  bool operator==(const QMat& o) const;

 private:
  long r_ = 0, c_ = 0;
  std::vector<QComplex> v_;
};

QMat operator+(const QMat& a, const QMat& b);
QMat operator-(const QMat& a, const QMat& b);
QMat operator*(const QMat& a, const QMat& b);
QMat operator*(const QComplex& s, const QMat& a);

template <>
struct MatTraits<QMat> {
  using Scalar = QComplex;
  static QMat zero(long n) { return QMat(n, n); }
  static void div(Scalar& x, long k) {
    x.re /= k;
    x.im /= k;
  }
  static void mul(Scalar& x, long k) {
    x.re *= k;
    x.im *= k;
  }
};

// Rounds x to the nearest multiple of 10^-digits (ties away from zero).
mpq_class round_decimal(double x, int digits);
QMat rationalize(const CMat& m, int digits);
CMat to_cmat(const QMat& m);
double to_double(const mpq_class& q);

QMat hermitize(const QMat& m);  // (M + M^dagger) / 2
bool is_hermitian(const QMat& m);

// Exact PSD test by fraction-free Gaussian-integer elimination. Throws on
// non-Hermitian input.
bool exact_psd(const QMat& m);
// Same verdict by rational LDL^dagger elimination; kept as an independent route.
bool exact_psd_ldl(const QMat& m);

// Inverse of a square matrix; throws std::domain_error when singular.
QMat inverse(const QMat& m);
// (A^dagger A)^{-1} A^dagger for A with independent columns.
QMat left_inverse(const QMat& a);

std::string to_string(const mpq_class& q);
mpq_class rational_from_string(const std::string& s);
// FNV-1a over the canonical decimal form of every entry.
std::uint64_t fnv1a(const std::vector<const QMat*>& mats);

}  // namespace globest

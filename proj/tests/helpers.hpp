#pragma once

#include <doctest.h>

#include <random>

#include "globest/invariants.hpp"
#include "globest/spaces.hpp"

namespace testutil {

using namespace globest;

inline CMat pauli_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMat pauli_y() {
  CMat m(2, 2);
  m << 0, cd(0, -1), cd(0, 1), 0;
  return m;
}
inline CMat pauli_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline CMat random_density(long d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMat g(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      double re = nd(rng);
      double im = nd(rng);
      g(i, j) = cd(re, im);
    }
  CMat r = g * g.adjoint();
  return r / r.trace().real();
}

inline double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline SpaceRegistry reg2(const std::string& a, int da, const std::string& b, int db) {
  return SpaceRegistry({{a, da}, {b, db}});
}

}  // namespace testutil

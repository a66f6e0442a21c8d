#pragma once

#include <random>

#include "numrange/linalg.hpp"

namespace testing {

using numrange::Complex;
using numrange::ComplexMatrix;
using numrange::ComplexVector;
using numrange::Index;

inline ComplexMatrix diag(std::initializer_list<Complex> d) {
  ComplexMatrix m = ComplexMatrix::Zero(Index(d.size()), Index(d.size()));
  Index i = 0;
  for (Complex z : d) m(i, i) = z, ++i;
  return m;
}

inline ComplexVector vec(std::initializer_list<Complex> d) {
  ComplexVector v(Index(d.size()));
  Index i = 0;
  for (Complex z : d) v(i++) = z;
  return v;
}

inline ComplexVector e(Index n, Index k) {
  ComplexVector v = ComplexVector::Zero(n);
  v(k) = 1.0;
  return v;
}

inline ComplexMatrix random_matrix(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline ComplexVector random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace testing

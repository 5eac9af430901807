#pragma once

#include "adboot/rng.hpp"
#include "adboot/sample.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace testutil {

inline adboot::Sample sample1(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return adboot::Sample(m, adboot::DuplicatePolicy::Allow);
}

inline adboot::Sample random_sample(std::uint64_t seed, Eigen::Index n, int d, double scale = 1.0) {
  adboot::CounterStream s(seed, 77);
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = scale * s.next_normal();
  return adboot::Sample(m, adboot::DuplicatePolicy::Allow);
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

// relative to max(1, |want|) so values near zero are compared absolutely
inline bool near(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

}  // namespace testutil

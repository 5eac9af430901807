#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <vector>

namespace adboot {

using Index = Eigen::Index;

// Worker count: explicit value if positive, else ADBOOT_WORKERS, else 1.
int resolve_workers(int requested);

// Runs task(k) for k in [0, count). Tasks are claimed dynamically, so task
// bodies must write only to their own slots.
void parallel_for(Index count, int workers, const std::function<void(Index)>& task);

// Pairwise (cascade) summation with a fixed split rule.
double pairwise_sum(const double* values, Index count);
inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(values.data(), static_cast<Index>(values.size()));
}

inline constexpr Index kRowChunk = 32;

// sum_{i<j} term(i, j). Rows are grouped in fixed chunks and every level of
// the reduction is a pairwise sum, so the result does not depend on workers.
template <class Term>
double upper_pair_sum(Index n, const Term& term, int workers = 1) {
  const Index chunks = (n + kRowChunk - 1) / kRowChunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  auto run = [&](Index c) {
    const Index r0 = c * kRowChunk;
    const Index r1 = std::min(n, r0 + kRowChunk);
    std::vector<double> rows;
    std::vector<double> buffer(static_cast<std::size_t>(n));
    for (Index i = r0; i < r1; ++i) {
      Index m = 0;
      for (Index j = i + 1; j < n; ++j) buffer[static_cast<std::size_t>(m++)] = term(i, j);
      rows.push_back(pairwise_sum(buffer.data(), m));
    }
    partial[static_cast<std::size_t>(c)] = pairwise_sum(rows);
  };
  if (workers <= 1) {
    for (Index c = 0; c < chunks; ++c) run(c);
  } else {
    parallel_for(chunks, workers, run);
  }
  return pairwise_sum(partial);
}

// sum_i term(i)
template <class Term>
double index_sum(Index n, const Term& term) {
  std::vector<double> buffer(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) buffer[static_cast<std::size_t>(i)] = term(i);
  return pairwise_sum(buffer);
}

}  // namespace adboot

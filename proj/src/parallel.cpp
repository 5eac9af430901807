#include "adboot/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace adboot {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ADBOOT_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("ADBOOT_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

void parallel_for(Index count, int workers, const std::function<void(Index)>& task) {
  if (count <= 0) return;
  const Index nthreads = std::min<Index>(std::max(workers, 1), count);
  if (nthreads <= 1) {
    for (Index k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    while (true) {
      const Index k = next.fetch_add(1);
      if (k >= count) return;
      try {
        task(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (Index t = 0; t < nthreads; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(const double* values, Index count) {
  if (count <= 8) {
    double s = 0.0;
    for (Index k = 0; k < count; ++k) s += values[k];
    return s;
  }
  const Index half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

}  // namespace adboot

#include "adboot/sample.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace adboot {

namespace {
std::mutex g_sink_mutex;
std::function<void(const std::string&)> g_sink;
}  // namespace

void set_warning_sink(std::function<void(const std::string&)> sink) {
  std::lock_guard<std::mutex> lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void emit_warning(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_sink_mutex);
  if (g_sink)
    g_sink(message);
  else
    std::cerr << "warning: " << message << '\n';
}

bool has_duplicate_rows(const Eigen::MatrixXd& data) {
  const Index n = data.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto less = [&](Index a, Index b) {
    for (Index j = 0; j < data.cols(); ++j) {
      if (data(a, j) < data(b, j)) return true;
      if (data(b, j) < data(a, j)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if ((data.row(order[k - 1]).array() == data.row(order[k]).array()).all()) return true;
  }
  return false;
}

Sample::Sample(Eigen::MatrixXd data, DuplicatePolicy policy) : data_(std::move(data)) {
  if (data_.rows() < 2) throw std::invalid_argument("a sample needs at least two observations");
  if (data_.cols() < 1) throw std::invalid_argument("a sample needs at least one column");
  if (!data_.allFinite()) throw std::invalid_argument("sample contains non-finite values");
  if (policy == DuplicatePolicy::Warn) {
    has_duplicates_ = has_duplicate_rows(data_);
    if (has_duplicates_) emit_warning("sample contains duplicated rows; continuous data are assumed tie-free");
  }
}

Sample Sample::select(const std::vector<Index>& indices) const {
  Eigen::MatrixXd out(static_cast<Index>(indices.size()), dim());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index i = indices[k];
    if (i < 0 || i >= n()) throw std::out_of_range("resample index out of range");
    out.row(static_cast<Index>(k)) = data_.row(i);
  }
  return Sample(std::move(out), DuplicatePolicy::Allow);
}

BlockScheme::BlockScheme(Index n, Index blocks) : n_(n), blocks_(blocks) {
  if (n < 2) throw std::invalid_argument("block scheme needs n >= 2");
  if (blocks < 2 || blocks > n) throw std::invalid_argument("block count must satisfy 2 <= B <= n");
  block_.resize(static_cast<std::size_t>(n));
  size_.assign(static_cast<std::size_t>(blocks), 0);
  start_.assign(static_cast<std::size_t>(blocks), -1);
  for (Index i = 0; i < n; ++i) {
    // ceil((i + 1) B / n) - 1
    const Index b = ((i + 1) * blocks + n - 1) / n - 1;
    block_[static_cast<std::size_t>(i)] = b;
    if (size_[static_cast<std::size_t>(b)]++ == 0) start_[static_cast<std::size_t>(b)] = i;
  }
  t_.resize(static_cast<std::size_t>(blocks));
  for (Index b = 0; b < blocks; ++b) {
    const double s = static_cast<double>(size_[static_cast<std::size_t>(b)]);
    const double m = static_cast<double>(n) - s;
    t_[static_cast<std::size_t>(b)] = s / (m * m);
    t_sum_ += t_[static_cast<std::size_t>(b)];
  }
}

double BlockScheme::weight(Index i, Index j) const {
  if (block_of(i) == block_of(j)) return 0.0;
  return 1.0 / static_cast<double>(outside_count(i));
}

double BlockScheme::eta() const {
  double s = 0.0;
  for (Index i = 0; i < n_; ++i) s += 1.0 / static_cast<double>(outside_count(i));
  return s;
}

double BlockScheme::isd_weight(Index i, Index j) const {
  const Index a = block_of(i), b = block_of(j);
  const double ta = t_[static_cast<std::size_t>(a)];
  if (a == b) return t_sum_ - ta;
  return t_sum_ - ta - t_[static_cast<std::size_t>(b)];
}

}  // namespace adboot

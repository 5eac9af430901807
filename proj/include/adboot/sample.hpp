#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace adboot {

using Index = Eigen::Index;

enum class DuplicatePolicy { Warn, Allow };

// n x d observations, one row per draw.
class Sample {
 public:
  explicit Sample(Eigen::MatrixXd data, DuplicatePolicy policy = DuplicatePolicy::Warn);

  Index n() const { return data_.rows(); }
  Index dim() const { return data_.cols(); }
  const Eigen::MatrixXd& data() const { return data_; }
  auto row(Index i) const { return data_.row(i); }
  bool has_duplicates() const { return has_duplicates_; }

  // Rows picked by an index vector (bootstrap resample); duplicates expected.
  Sample select(const std::vector<Index>& indices) const;

 private:
  Eigen::MatrixXd data_;
  bool has_duplicates_ = false;
};

bool has_duplicate_rows(const Eigen::MatrixXd& data);

// Warnings go through a replaceable sink (stderr by default).
void set_warning_sink(std::function<void(const std::string&)> sink);
void emit_warning(const std::string& message);

// Contiguous blocks: block(i) = ceil(i B / n) for 1-based i.
class BlockScheme {
 public:
  BlockScheme(Index n, Index blocks);

  Index n() const { return n_; }
  Index blocks() const { return blocks_; }
  // 0-based block of 0-based observation i.
  Index block_of(Index i) const { return block_[static_cast<std::size_t>(i)]; }
  Index block_size(Index b) const { return size_[static_cast<std::size_t>(b)]; }
  Index block_start(Index b) const { return start_[static_cast<std::size_t>(b)]; }
  // #{k : block(k) != block(i)}
  Index outside_count(Index i) const { return n_ - block_size(block_of(i)); }
  // w_ij = 1(block(i) != block(j)) / outside_count(i)
  double weight(Index i, Index j) const;
  // eta = sum_i 1 / outside_count(i)
  double eta() const;
  // Omega_ij = sum_k w_ki w_kj (the ISD-LO pair weight divided by n).
  double isd_weight(Index i, Index j) const;

 private:
  Index n_;
  Index blocks_;
  std::vector<Index> block_;
  std::vector<Index> size_;
  std::vector<Index> start_;
  std::vector<double> t_;  // |b| / m_b^2
  double t_sum_ = 0.0;
};

}  // namespace adboot

#pragma once

#include <cstddef>
#include <vector>

namespace roco {

/// Sorted multiset of doubles split into bounded sorted blocks.
/// insert: O(log n + B), select: O(n / B + 1) with block size B.
class OrderStatistics {
 public:
  explicit OrderStatistics(std::size_t block_size = 512);

  void insert(double value);
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  /// The r-th smallest value, 1 <= r <= size().
  double select(std::size_t rank) const;
  void clear();

 private:
  std::size_t block_size_;
  std::size_t size_ = 0;
  std::vector<std::vector<double>> blocks_;
  std::vector<double> block_max_;
};

}  // namespace roco

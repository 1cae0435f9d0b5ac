#include "roco/order_statistics.hpp"

#include <algorithm>

#include "roco/core.hpp"

namespace roco {

OrderStatistics::OrderStatistics(std::size_t block_size) : block_size_(std::max<std::size_t>(block_size, 4)) {}

void OrderStatistics::clear() {
  blocks_.clear();
  block_max_.clear();
  size_ = 0;
}

void OrderStatistics::insert(double value) {
  ++size_;
  if (blocks_.empty()) {
    blocks_.push_back({value});
    block_max_.push_back(value);
    return;
  }
  // First block whose max is >= value; the last block takes everything larger.
  auto it = std::lower_bound(block_max_.begin(), block_max_.end(), value);
  std::size_t b = it == block_max_.end() ? blocks_.size() - 1 : static_cast<std::size_t>(it - block_max_.begin());
  std::vector<double>& blk = blocks_[b];
  blk.insert(std::upper_bound(blk.begin(), blk.end(), value), value);
  block_max_[b] = blk.back();
  if (blk.size() > 2 * block_size_) {
    std::vector<double> upper(blk.begin() + static_cast<std::ptrdiff_t>(block_size_), blk.end());
    blk.resize(block_size_);
    block_max_[b] = blk.back();
    blocks_.insert(blocks_.begin() + static_cast<std::ptrdiff_t>(b) + 1, std::move(upper));
    block_max_.insert(block_max_.begin() + static_cast<std::ptrdiff_t>(b) + 1, blocks_[b + 1].back());
  }
}

double OrderStatistics::select(std::size_t rank) const {
  if (rank < 1 || rank > size_) throw ContractViolation("OrderStatistics::select: rank out of range");
  if (2 * rank <= size_) {
    std::size_t r = rank - 1;
    for (const auto& blk : blocks_) {
      if (r < blk.size()) return blk[r];
      r -= blk.size();
    }
  } else {
    // Count from the top; high quantiles are the common query.
    std::size_t r = size_ - rank;
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      if (r < it->size()) return (*it)[it->size() - 1 - r];
      r -= it->size();
    }
  }
  throw ContractViolation("OrderStatistics::select: corrupted blocks");
}

}  // namespace roco

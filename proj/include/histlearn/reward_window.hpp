#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace histlearn {

// Fixed-capacity ring buffer over the last `capacity` reward vectors.
class RewardWindow {
 public:
  RewardWindow(std::size_t capacity, std::size_t width);

  std::size_t capacity() const { return capacity_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return size_; }
  bool full() const { return size_ == capacity_; }

  // 0 is the oldest stored row.
  std::span<const double> at(std::size_t age_rank) const;
  std::span<const double> oldest() const { return at(0); }

  // Appends `row`. When full, the oldest row is overwritten; a copy of it is
  // kept and returned until the next push.
  std::span<const double> push(std::span<const double> row);

  const std::vector<double>& raw() const { return data_; }
  std::size_t head() const { return head_; }

 private:
  std::size_t capacity_;
  std::size_t width_;
  std::size_t head_ = 0;  // slot of the oldest row
  std::size_t size_ = 0;
  std::vector<double> data_;
  std::vector<double> evicted_;
};

}  // namespace histlearn

#include "histlearn/reward_window.hpp"

#include <algorithm>
#include <stdexcept>

namespace histlearn {

RewardWindow::RewardWindow(std::size_t capacity, std::size_t width)
    : capacity_(capacity), width_(width), data_(capacity * width, 0.0) {
  if (capacity_ == 0) throw std::invalid_argument("window capacity must be > 0");
}

std::span<const double> RewardWindow::at(std::size_t age_rank) const {
  if (age_rank >= size_) throw std::out_of_range("window index");
  const std::size_t slot = (head_ + age_rank) % capacity_;
  return std::span<const double>(data_).subspan(slot * width_, width_);
}

std::span<const double> RewardWindow::push(std::span<const double> row) {
  if (row.size() != width_) throw std::invalid_argument("row width");
  if (size_ < capacity_) {
    const std::size_t slot = (head_ + size_) % capacity_;
    std::copy(row.begin(), row.end(), data_.begin() + slot * width_);
    ++size_;
    return {};
  }
  auto oldest = data_.begin() + head_ * width_;
  evicted_.assign(oldest, oldest + width_);
  std::copy(row.begin(), row.end(), oldest);
  head_ = (head_ + 1) % capacity_;
  return evicted_;
}

}  // namespace histlearn

#pragma once

#include <cstddef>
#include <vector>

namespace ccpdmp {

/// Indexed binary min-heap of one pending time per id.
/// Ties go to the smallest id.
class LocalEventQueue {
 public:
  explicit LocalEventQueue(std::size_t n);

  void set(std::size_t id, double time);
  double time(std::size_t id) const { return time_[id]; }
  std::size_t top() const { return heap_.front(); }
  double top_time() const { return time_[heap_.front()]; }
  std::size_t size() const { return heap_.size(); }

 private:
  bool before(std::size_t a, std::size_t b) const {
    return time_[a] < time_[b] || (time_[a] == time_[b] && a < b);
  }
  void sift_up(std::size_t i);
  void sift_down(std::size_t i);
  void swap_nodes(std::size_t i, std::size_t j);

  std::vector<double> time_;
  std::vector<std::size_t> heap_;
  std::vector<std::size_t> pos_;
};

}  // namespace ccpdmp

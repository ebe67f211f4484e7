#include "ccpdmp/event_queue.hpp"

#include <limits>
#include <utility>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

LocalEventQueue::LocalEventQueue(std::size_t n)
    : time_(n, std::numeric_limits<double>::infinity()), heap_(n), pos_(n) {
  if (n == 0) throw DomainError("event queue: needs at least one slot");
  for (std::size_t i = 0; i < n; ++i) heap_[i] = pos_[i] = i;
}

void LocalEventQueue::set(std::size_t id, double time) {
  if (id >= time_.size()) throw DomainError("event queue: id out of range");
  const double old = time_[id];
  time_[id] = time;
  if (time < old) sift_up(pos_[id]);
  else sift_down(pos_[id]);
}

void LocalEventQueue::swap_nodes(std::size_t i, std::size_t j) {
  std::swap(heap_[i], heap_[j]);
  pos_[heap_[i]] = i;
  pos_[heap_[j]] = j;
}

void LocalEventQueue::sift_up(std::size_t i) {
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!before(heap_[i], heap_[parent])) break;
    swap_nodes(i, parent);
    i = parent;
  }
}

void LocalEventQueue::sift_down(std::size_t i) {
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t best = i;
    const std::size_t l = 2 * i + 1;
    const std::size_t r = l + 1;
    if (l < n && before(heap_[l], heap_[best])) best = l;
    if (r < n && before(heap_[r], heap_[best])) best = r;
    if (best == i) return;
    swap_nodes(i, best);
    i = best;
  }
}

}  // namespace ccpdmp

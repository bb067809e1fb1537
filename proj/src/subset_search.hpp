#pragma once

// Ordered subset search shared by the exact and sampled relevance searches.
// Candidates of sizes lo..hi drawn from positions [0, universe) are visited
// by size, then lexicographically by sorted positions. The hit with the
// smallest index in that order wins regardless of the thread count.

#include "deltarel/bits.hpp"
#include "deltarel/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace deltarel::detail {

class SubsetCursor {
 public:
  SubsetCursor(std::size_t arity, std::size_t universe, std::size_t lo, std::size_t hi)
      : arity_(arity), universe_(universe), hi_(std::min(hi, universe)), size_(lo) {
    reset_size();
  }

  bool done() const { return size_ > hi_; }

  SubsetMask current() const {
    SubsetMask s(arity_);
    for (auto p : pos_) s.insert(p);
    return s;
  }

  void advance() {
    const std::size_t s = pos_.size();
    for (std::size_t i = s; i-- > 0;) {
      if (pos_[i] < universe_ - s + i) {
        ++pos_[i];
        for (std::size_t j = i + 1; j < s; ++j) pos_[j] = pos_[j - 1] + 1;
        return;
      }
    }
    ++size_;
    reset_size();
  }

 private:
  void reset_size() {
    if (size_ > hi_) return;
    pos_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) pos_[i] = i;
  }

  std::size_t arity_, universe_, hi_, size_;
  std::vector<std::size_t> pos_;
};

struct SearchHit {
  std::uint64_t index = 0;
  SubsetMask mask;
};

/// test(state, mask, index) -> bool. One State per worker, built by make().
template <class State, class Make, class Test>
std::optional<SearchHit> search_first(std::size_t arity, std::size_t universe, std::size_t lo, std::size_t hi,
                                      unsigned threads, Make&& make, Test&& test, std::vector<State>& states) {
  SubsetCursor cursor(arity, universe, lo, hi);
  if (threads <= 1) {
    states.push_back(make());
    for (std::uint64_t index = 0; !cursor.done(); cursor.advance(), ++index) {
      auto mask = cursor.current();
      if (test(states.back(), mask, index)) return SearchHit{index, std::move(mask)};
    }
    return std::nullopt;
  }

  constexpr std::size_t kBatch = 512;
  std::mutex mu;
  std::uint64_t next_index = 0;
  std::atomic<std::uint64_t> best{UINT64_MAX};
  std::optional<SearchHit> hit;
  std::exception_ptr failure;
  for (unsigned t = 0; t < threads; ++t) states.push_back(make());

  auto worker = [&](State& state) {
    std::vector<SubsetMask> batch;
    while (true) {
      std::uint64_t base = 0;
      {
        std::lock_guard lock(mu);
        if (cursor.done() || failure || next_index > best.load()) return;
        batch.clear();
        base = next_index;
        while (batch.size() < kBatch && !cursor.done()) {
          batch.push_back(cursor.current());
          cursor.advance();
        }
        next_index += batch.size();
      }
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::uint64_t index = base + i;
        if (index > best.load()) break;
        bool ok = false;
        try {
          ok = test(state, batch[i], index);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          return;
        }
        if (ok) {
          std::lock_guard lock(mu);
          if (index < best.load()) {
            best.store(index);
            hit = SearchHit{index, batch[i]};
          }
          break;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, std::ref(states[t]));
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return hit;
}

}  // namespace deltarel::detail

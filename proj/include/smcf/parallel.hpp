#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace smcf {

/// Worker count for `requested` threads; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Computes compute(i) for i in [0, count) on up to `threads` workers and
/// hands each result to consume(i, result) on the calling thread in
/// increasing i. Work is processed in batches so memory stays bounded; the
/// consumption order, and hence any reduction done in consume, does not
/// depend on the thread count.
template <typename T>
void for_each_sample_ordered(std::size_t count, unsigned threads,
                             const std::function<T(std::size_t)>& compute,
                             const std::function<void(std::size_t, T&)>& consume) {
  const unsigned workers = resolve_threads(threads);
  const std::size_t batch = std::max<std::size_t>(64, 4 * static_cast<std::size_t>(workers));
  std::vector<std::optional<T>> slots(std::min(batch, count));
  for (std::size_t begin = 0; begin < count; begin += batch) {
    const std::size_t end = std::min(count, begin + batch);
    std::atomic<std::size_t> next{begin};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= end) return;
        try {
          slots[i - begin].emplace(compute(i));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(end);
        }
      }
    };
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, end - begin));
    if (used <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(used);
      for (unsigned t = 0; t < used; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    for (std::size_t i = begin; i < end; ++i) {
      consume(i, *slots[i - begin]);
      slots[i - begin].reset();
    }
  }
}

}  // namespace smcf

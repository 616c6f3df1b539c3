#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace blochdyn {

/// Runs body(i) for i in [0, count) on up to `threads` workers, each taking a
/// contiguous chunk. The first exception thrown by any worker is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) summation; the order depends only on the length, so the
/// result is bitwise reproducible regardless of how the terms were computed.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> values) {
  if (values.empty()) return Scalar(0);
  if (values.size() <= 8) {
    Scalar s = 0;
    for (Scalar v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename Scalar>
Scalar pairwise_sum(const std::vector<Scalar>& values) {
  return pairwise_sum(std::span<const Scalar>(values));
}

}  // namespace blochdyn

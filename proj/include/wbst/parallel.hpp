#pragma once

#include <cstddef>
#include <algorithm>
#include <exception>
#include <mutex>
#include <vector>

namespace wbst {

enum class Execution { serial, parallel };

inline constexpr std::size_t default_block = 1024;

// Runs body(acc, i) for i in [0, count) over fixed blocks of indices, one
// accumulator per block, then merges the blocks in index order. The result is
// therefore independent of the thread count and of the execution policy.
// Acc needs merge(const Acc&).
template <class Acc, class Body>
Acc block_accumulate(std::size_t count, const Acc& init, Body body,
                     Execution exec = Execution::parallel, std::size_t block = default_block) {
  const std::size_t blocks = (count + block - 1) / block;
  std::vector<Acc> partial(blocks, init);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto run_block = [&](std::size_t b) {
    try {
      const std::size_t end = std::min(count, (b + 1) * block);
      for (std::size_t i = b * block; i < end; ++i) body(partial[b], i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
      run_block(static_cast<std::size_t>(b));
    }
  } else {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  }
  if (failure) std::rethrow_exception(failure);
  Acc out = init;
  for (const auto& p : partial) out.merge(p);
  return out;
}

// Fills out[i] = f(i); rethrows the first exception raised by any index.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F f, Execution exec = Execution::parallel) {
  std::vector<T> out(count);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto run = [&](std::size_t i) {
    try {
      out[i] = f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
      run(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) run(i);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace wbst

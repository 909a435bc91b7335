// Minimal fork/join helpers over std::async.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace qdeform {

/// Worker count: QDEFORM_THREADS if set and positive, else hardware concurrency.
inline int default_thread_count() {
  if (const char *env = std::getenv("QDEFORM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) {
        return n;
      }
    } catch (const std::exception &) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Evaluates fn(0..count-1) on up to `threads` workers; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t count, int threads, Fn &&fn)
    -> std::vector<std::invoke_result_t<Fn &, std::size_t>> {
  using R = std::invoke_result_t<Fn &, std::size_t>;
  std::vector<R> out;
  out.reserve(count);
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(fn(i));
    }
    return out;
  }
  // Strided chunks; each worker writes only its own slots.
  std::vector<std::vector<R>> parts(workers);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        parts[w].push_back(fn(i));
      }
    }));
  }
  for (auto &j : jobs) {
    j.get();
  }
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(std::move(parts[i % workers][i / workers]));
  }
  return out;
}

} // namespace qdeform

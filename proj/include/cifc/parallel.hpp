#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cifc {

// Bad input (schema, ranges, unknown names).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called outside the regime it is valid for.
class regime_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Singular matrices, unbounded regions, inconsistent numerics.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CIFC_THREADS caps the count; defaults to hardware concurrency.
unsigned worker_count();

// Evaluates f(i) for i in [0, n) on contiguous chunks; results come back in
// index order regardless of the thread count.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  unsigned w = worker_count();
  if (w <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  if (w > n) w = static_cast<unsigned>(n);
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  std::size_t chunk = (n + w - 1) / w;
  for (unsigned t = 0; t < w; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace cifc

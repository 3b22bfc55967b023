#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace voxgen {

// Persistent worker pool. Work is handed out as index ranges with disjoint
// output regions, so results do not depend on scheduling; reductions are the
// caller's responsibility and must use a fixed order.
class ThreadPool {
 public:
  explicit ThreadPool(std::size_t n_threads) {
    if (n_threads == 0) n_threads = 1;
    for (std::size_t i = 1; i < n_threads; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::unique_lock lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  std::size_t size() const { return workers_.size() + 1; }

  // Runs fn(begin, end) over [0, n) split into roughly equal chunks.
  // The calling thread participates. Blocks until all chunks finish.
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t nthreads = size();
    if (nthreads == 1 || n == 1) {
      fn(0, n);
      return;
    }
    std::size_t chunks = std::min(nthreads, n);
    std::size_t per = (n + chunks - 1) / chunks;
    std::size_t pending = 0;
    {
      std::unique_lock lock(mu_);
      for (std::size_t c = 1; c < chunks; ++c) {
        std::size_t b = c * per;
        std::size_t e = std::min(n, b + per);
        if (b >= e) continue;
        tasks_.emplace_back([fn, b, e] { fn(b, e); });
        ++pending;
      }
      outstanding_ += pending;
    }
    cv_.notify_all();
    fn(0, std::min(n, per));
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [this] { return outstanding_ == 0; });
  }

  // Shared process-wide pool sized from the config (see set_global_threads).
  static ThreadPool& global() {
    static ThreadPool pool(global_threads());
    return pool;
  }

  // Must be called before the first use of global() to take effect.
  static void set_global_threads(std::size_t n) { global_threads() = n; }

 private:
  static std::size_t& global_threads() {
    static std::size_t n = std::thread::hardware_concurrency();
    return n;
  }

  void worker_loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stop_ || !tasks_.empty(); });
        if (stop_ && tasks_.empty()) return;
        task = std::move(tasks_.back());
        tasks_.pop_back();
      }
      task();
      {
        std::unique_lock lock(mu_);
        if (--outstanding_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> workers_;
  std::vector<std::function<void()>> tasks_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  std::size_t outstanding_ = 0;
  bool stop_ = false;
};

}  // namespace voxgen

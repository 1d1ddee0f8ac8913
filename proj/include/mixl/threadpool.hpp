#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mixl {

// Minimal fixed-size pool for per-epoch fan-out. Work is partitioned into
// contiguous chunks by worker index, so the assignment is deterministic.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) {
    const int extra = workers > 1 ? workers - 1 : 0;
    threads_.reserve(extra);
    for (int i = 0; i < extra; ++i) {
      threads_.emplace_back([this, i] { worker_loop(i + 1); });
    }
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int workers() const { return static_cast<int>(threads_.size()) + 1; }

  // Runs fn(worker, begin, end) over a partition of [0, count) across all
  // workers (including the calling thread, as worker 0). Blocks until every
  // chunk is done.
  void parallel_for(int count, const std::function<void(int, int, int)>& fn) {
    const int w = workers();
    if (w == 1 || count <= 1) {
      if (count > 0) fn(0, 0, count);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      job_ = &fn;
      count_ = count;
      ++generation_;
      pending_ = w - 1;
    }
    wake_.notify_all();
    run_chunk(fn, 0, count, w);
    std::unique_lock<std::mutex> lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  static void run_chunk(const std::function<void(int, int, int)>& fn, int index,
                        int count, int workers) {
    const int base = count / workers;
    const int rem = count % workers;
    const int begin = index * base + (index < rem ? index : rem);
    const int end = begin + base + (index < rem ? 1 : 0);
    if (begin < end) fn(index, begin, end);
  }

  void worker_loop(int index) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int, int, int)>* job = nullptr;
      int count = 0;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        job = job_;
        count = count_;
      }
      run_chunk(*job, index, count, workers());
      {
        std::lock_guard<std::mutex> lock(mutex_);
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(int, int, int)>* job_ = nullptr;
  int count_ = 0;
  std::uint64_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace mixl

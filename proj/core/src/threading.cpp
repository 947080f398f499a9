#include "hwave/threading.hpp"

#include <memory>
#include <stdexcept>

namespace hwave {

ThreadPool::ThreadPool(unsigned threads) {
  if (threads < 1) threads = 1;
  workers_.reserve(threads - 1);
  for (unsigned i = 0; i + 1 < threads; ++i)
    workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  cv_start_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::run_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn) {
  if (chunks == 0) return;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    job_ = &fn;
    job_chunks_ = chunks;
    next_chunk_.store(0, std::memory_order_relaxed);
    active_ = workers_.size();
    error_ = nullptr;
    ++generation_;
  }
  cv_start_.notify_all();

  // The calling thread works too.
  for (;;) {
    const std::size_t c = next_chunk_.fetch_add(1, std::memory_order_relaxed);
    if (c >= chunks) break;
    try {
      fn(c);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  std::unique_lock<std::mutex> lock(mutex_);
  cv_done_.wait(lock, [this] { return active_ == 0; });
  job_ = nullptr;
  if (error_) std::rethrow_exception(error_);
}

void ThreadPool::worker_loop() {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t)>* job = nullptr;
    std::size_t chunks = 0;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_start_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      chunks = job_chunks_;
    }
    for (;;) {
      const std::size_t c = next_chunk_.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) break;
      try {
        (*job)(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!error_) error_ = std::current_exception();
      }
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --active_;
    }
    cv_done_.notify_one();
  }
}

namespace {
std::unique_ptr<ThreadPool>& pool_slot() {
  static std::unique_ptr<ThreadPool> pool = std::make_unique<ThreadPool>(1);
  return pool;
}
}  // namespace

void set_thread_count(unsigned threads) {
  if (threads < 1) threads = 1;
  pool_slot() = std::make_unique<ThreadPool>(threads);
}

unsigned thread_count() { return pool_slot()->size(); }

namespace detail {

ThreadPool& global_pool() { return *pool_slot(); }

void pairwise_combine(std::vector<double>& partials) {
  // In-place pairwise tree: combine neighbours at stride 1, 2, 4, ...
  // Order is fixed by chunk index, never by thread schedule.
  for (std::size_t stride = 1; stride < partials.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partials.size(); i += 2 * stride)
      partials[i] += partials[i + stride];
  }
  if (partials.empty()) partials.push_back(0.0);
}

}  // namespace detail

}  // namespace hwave

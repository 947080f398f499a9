#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hwave {

/// Fixed-size worker pool shared by all numerical kernels.
///
/// Work is split into chunks with *fixed* boundaries; workers grab chunk
/// indices from an atomic counter, so the assignment of chunks to threads is
/// dynamic but every per-chunk result is stored by chunk index.  Reductions
/// then combine chunk results in index order, which makes every reduction
/// bit-identical regardless of the thread count.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

  /// Runs fn(chunk_index) for chunk_index in [0, chunks).  The calling thread
  /// participates.  Blocks until all chunks are done.  Exceptions thrown by fn
  /// are rethrown on the calling thread (first one wins).
  void run_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn);

 private:
  void worker_loop();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_chunks_ = 0;
  std::atomic<std::size_t> next_chunk_{0};
  std::size_t active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

/// Sets the global worker count (>= 1).  Replaces the shared pool; safe to
/// call between parallel regions, not from inside one.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Element count per reduction chunk.  Fixed so that sums are independent of
/// the thread count.
inline constexpr std::size_t kReductionChunk = 8192;

namespace detail {
ThreadPool& global_pool();
void pairwise_combine(std::vector<double>& partials);
}  // namespace detail

/// Parallel loop over [0, count) in fixed chunks of `grain` elements.
/// body(begin, end, chunk_index) must only write state owned by its chunk.
/// Chunk boundaries depend on grain alone, never on the thread count.
template <typename Body>
void parallel_for(std::size_t count, std::size_t grain, const Body& body) {
  if (count == 0) return;
  if (grain < 1) grain = 1;
  const std::size_t chunks = (count + grain - 1) / grain;
  if (chunks == 1 || thread_count() == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t lo = c * grain;
      body(lo, std::min(lo + grain, count), c);
    }
    return;
  }
  detail::global_pool().run_chunks(chunks, [&](std::size_t c) {
    const std::size_t lo = c * grain;
    body(lo, std::min(lo + grain, count), c);
  });
}

/// Deterministic sum of term(i) for i in [0, count).  Each fixed chunk is
/// summed left to right, then chunk sums are combined with a pairwise tree.
/// The result does not depend on the thread count.
template <typename Term>
double deterministic_sum(std::size_t count, const Term& term) {
  if (count == 0) return 0.0;
  const std::size_t chunks = (count + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partials(chunks, 0.0);
  parallel_for(count, kReductionChunk, [&](std::size_t lo, std::size_t hi, std::size_t c) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partials[c] = s;
  });
  detail::pairwise_combine(partials);
  return partials[0];
}

}  // namespace hwave

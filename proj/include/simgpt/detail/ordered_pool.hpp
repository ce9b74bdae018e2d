#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace simgpt::detail {

// Runs `work(i)` for every i with needs_work[i] on up to `max_in_flight`
// threads and calls `commit(i, result)` on the calling thread in index order
// (result is empty for skipped indices). An exception from work or commit
// stops new work, joins the workers and propagates.
template <class R, class Work, class Commit>
void run_in_order(const std::vector<bool>& needs_work, std::size_t max_in_flight, Work work,
                  Commit commit) {
  const std::size_t count = needs_work.size();
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::vector<char> done(count, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      if (!needs_work[i]) continue;
      std::optional<R> result;
      std::exception_ptr error;
      try {
        result.emplace(work(i));
      } catch (...) {
        error = std::current_exception();
        stop.store(true);
      }
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(result);
        errors[i] = error;
        done[i] = 1;
      }
      cv.notify_all();
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(max_in_flight, count));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);

  auto join_all = [&] {
    stop.store(true);
    for (auto& th : pool) {
      if (th.joinable()) th.join();
    }
  };

  try {
    for (std::size_t i = 0; i < count; ++i) {
      if (!needs_work[i]) {
        commit(i, std::optional<R>{});
        continue;
      }
      std::optional<R> result;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[i] != 0; });
        if (errors[i]) std::rethrow_exception(errors[i]);
        result = std::move(slots[i]);
      }
      commit(i, std::move(result));
    }
  } catch (...) {
    join_all();
    throw;
  }
  join_all();
}

}  // namespace simgpt::detail

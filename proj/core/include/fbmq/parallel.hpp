#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace fbmq {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs body(replicate_index, state) for every replicate in [0, reps), split in
// contiguous chunks across `workers` threads. `make_state(worker)` builds one
// per-thread scratch object (samplers, buffers). Replicate results must be
// written into caller-owned slots indexed by replicate, so the outcome is
// independent of the worker count.
template <class MakeState, class Body>
void parallel_replicates(std::uint64_t reps, unsigned workers, MakeState&& make_state,
                         Body&& body) {
  workers = resolve_workers(workers);
  if (reps == 0) return;
  if (workers > reps) workers = static_cast<unsigned>(reps);

  if (workers == 1) {
    auto state = make_state(0u);
    for (std::uint64_t r = 0; r < reps; ++r) body(r, state);
    return;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex error_mu;
  std::exception_ptr first_error;
  const std::uint64_t chunk = reps / workers;
  const std::uint64_t extra = reps % workers;
  std::uint64_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t len = chunk + (w < extra ? 1 : 0);
    const std::uint64_t end = begin + len;
    pool.emplace_back([&, w, begin, end]() {
      try {
        auto state = make_state(w);
        for (std::uint64_t r = begin; r < end; ++r) body(r, state);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fbmq

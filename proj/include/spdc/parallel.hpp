#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace spdc {

inline int worker_count() {
  if (const char* env = std::getenv("SPDC_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Deterministic chunked map-reduce: items are split into fixed-size chunks,
// each chunk is reduced in index order into its own accumulator, and chunk
// accumulators are combined sequentially. The result is independent of the
// number of worker threads.
//
//   make_acc()            -> Acc
//   body(Acc&, size_t i)  accumulate item i
//   combine(Acc&, Acc&&)  fold the next chunk into the running total
template <class MakeAcc, class Body, class Combine>
auto chunked_reduce(std::size_t n_items, std::size_t chunk_size, MakeAcc make_acc,
                    Body body, Combine combine) -> decltype(make_acc()) {
  using Acc = decltype(make_acc());
  if (chunk_size == 0) chunk_size = 1;
  std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  std::vector<Acc> partial;
  partial.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) partial.push_back(make_acc());

  auto run_chunk = [&](std::size_t c) {
    std::size_t lo = c * chunk_size;
    std::size_t hi = std::min(n_items, lo + chunk_size);
    for (std::size_t i = lo; i < hi; ++i) body(partial[c], i);
  };

  int workers = std::min<std::size_t>(worker_count(), n_chunks ? n_chunks : 1);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
          run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  Acc total = make_acc();
  for (std::size_t c = 0; c < n_chunks; ++c) combine(total, std::move(partial[c]));
  return total;
}

}  // namespace spdc

#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace bclab {

/// Worker count resolution: the BCLAB_WORKERS environment variable wins,
/// then a positive configured value, then hardware concurrency.
int resolve_worker_count(int configured);

struct WorkerBlock {
  int worker = 0;
  std::uint64_t begin = 0;  ///< first index (inclusive)
  std::uint64_t end = 0;    ///< one past the last index
};

/// Static block partition of [0, count) across workers. Independent of any
/// scheduling dynamics, so recorded per-worker ranges are reproducible.
std::vector<WorkerBlock> partition_blocks(std::uint64_t count, int workers);

/// Runs body(i) for every i in [0, count) using the static partition.
/// Results must be written to index-addressed slots by the body; the first
/// exception thrown by any worker is rethrown after all join.
template <class Body>
void parallel_for_indexed(std::uint64_t count, int workers, Body&& body) {
  auto blocks = partition_blocks(count, workers);
  if (blocks.size() <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(blocks.size());
  threads.reserve(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    threads.emplace_back([&, b]() {
      try {
        for (std::uint64_t i = blocks[b].begin; i < blocks[b].end; ++i) body(i);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace bclab

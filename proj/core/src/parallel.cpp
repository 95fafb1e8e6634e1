#include "bclab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "bclab/errors.hpp"

namespace bclab {

int resolve_worker_count(int configured) {
  if (const char* env = std::getenv("BCLAB_WORKERS")) {
    try {
      int w = std::stoi(env);
      if (w < 1) throw ConfigError("BCLAB_WORKERS must be >= 1");
      return w;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      throw ConfigError("BCLAB_WORKERS is not an integer");
    }
  }
  if (configured > 0) return configured;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<WorkerBlock> partition_blocks(std::uint64_t count, int workers) {
  std::vector<WorkerBlock> blocks;
  if (count == 0 || workers < 1) return blocks;
  auto w = static_cast<std::uint64_t>(workers);
  w = std::min(w, count);
  std::uint64_t base = count / w;
  std::uint64_t extra = count % w;
  std::uint64_t at = 0;
  for (std::uint64_t k = 0; k < w; ++k) {
    WorkerBlock b;
    b.worker = static_cast<int>(k);
    b.begin = at;
    at += base + (k < extra ? 1 : 0);
    b.end = at;
    blocks.push_back(b);
  }
  return blocks;
}

}  // namespace bclab

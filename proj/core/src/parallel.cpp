#include "mpstomo/parallel.hpp"

#include "mpstomo/error.hpp"

namespace mpstomo {

std::vector<Block> block_plan(std::size_t total, std::size_t block_size) {
  if (block_size == 0) throw ArgumentError("block size must be positive");
  std::vector<Block> blocks;
  for (std::size_t b = 0, i = 0; b < total; b += block_size, ++i) {
    blocks.push_back({i, b, std::min(total, b + block_size)});
  }
  return blocks;
}

int resolve_workers(int workers) {
  if (workers < 0) throw ArgumentError("workers must be non-negative");
  if (workers == 0) return std::max(1u, std::thread::hardware_concurrency());
  return workers;
}

}  // namespace mpstomo

//
// Copyright 2026 The privlens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Chunked parallel loops whose results never depend on the thread count.
// Work is split into chunks whose boundaries are fixed by the problem size
// alone; each chunk writes its own slot and callers reduce the slots in
// chunk order.

#ifndef PRIVLENS_PARALLEL_H_
#define PRIVLENS_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace privlens {

namespace internal {
inline std::atomic<int>& ThreadSetting() {
  static std::atomic<int> threads{1};
  return threads;
}
}  // namespace internal

inline void SetThreadCount(int threads) {
  internal::ThreadSetting().store(std::max(1, threads));
}

inline int ThreadCount() { return internal::ThreadSetting().load(); }

namespace internal {
inline bool& InsideParallelRegion() {
  thread_local bool inside = false;
  return inside;
}
}  // namespace internal

// Runs fn(chunk) for chunk in [0, num_chunks). Calls nested inside a worker
// run serially on that worker.
template <typename Fn>
void ParallelForChunks(size_t num_chunks, Fn&& fn) {
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(ThreadCount()), num_chunks);
  if (workers <= 1 || internal::InsideParallelRegion()) {
    for (size_t c = 0; c < num_chunks; ++c) fn(c);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      internal::InsideParallelRegion() = true;
      for (size_t c = next.fetch_add(1); c < num_chunks;
           c = next.fetch_add(1)) {
        fn(c);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

// Chunk geometry for a range of `total` items with a fixed chunk size.
struct ChunkPlan {
  size_t total;
  size_t chunk_size;

  size_t count() const {
    return total == 0 ? 0 : (total + chunk_size - 1) / chunk_size;
  }
  size_t begin(size_t c) const { return c * chunk_size; }
  size_t end(size_t c) const { return std::min(total, (c + 1) * chunk_size); }
};

}  // namespace privlens

#endif  // PRIVLENS_PARALLEL_H_

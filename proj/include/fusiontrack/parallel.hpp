// Copyright 2026 The FusionTrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUSIONTRACK__PARALLEL_HPP_
#define FUSIONTRACK__PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fusiontrack
{

/// Worker count from FUSIONTRACK_THREADS; unset, 0 or unparsable means hardware concurrency.
inline unsigned thread_budget()
{
  unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const char * env = std::getenv("FUSIONTRACK_THREADS");
  if (!env || !*env) return hw;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : hw;
  } catch (const std::exception &) {
    return hw;
  }
}

/// Calls fn(i) for i in [0, n). Work items must not depend on each other; the first
/// exception thrown by any item is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn && fn, unsigned threads = thread_budget())
{
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto & t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__PARALLEL_HPP_

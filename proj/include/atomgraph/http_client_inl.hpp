// Copyright 2026 The atomgraph Authors
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

#pragma once

#include <thread>

#include "atomgraph/errors.hpp"

namespace atomgraph {

template <typename F>
auto with_retries(int max_attempts, std::chrono::milliseconds initial_backoff, F&& attempt)
    -> decltype(attempt()) {
  auto delay = initial_backoff;
  for (int i = 1;; ++i) {
    try {
      return attempt();
    } catch (const RetryableError&) {
      if (i >= max_attempts) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

}  // namespace atomgraph

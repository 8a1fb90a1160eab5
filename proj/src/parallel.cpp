// Copyright 2026 The exposure-probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xprobe/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xprobe {
namespace {

std::atomic<int> g_jobs{0};

int default_jobs() {
  if (const char* env = std::getenv("EXPOSURE_PROBE_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

int jobs() {
  const int n = g_jobs.load(std::memory_order_relaxed);
  return n > 0 ? n : default_jobs();
}

void set_jobs(int n) { g_jobs.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace xprobe

/*
 * faceforge - differentiable 3D head model fitting, detail displacement,
 * and scan-to-mesh evaluation.
 *
 * Copyright 2026 The faceforge authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "faceforge/core/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace faceforge {

namespace {
int g_max_threads = 0;
} // namespace

void set_max_threads(int n) { g_max_threads = n < 0 ? 0 : n; }

int max_threads() {
    if (g_max_threads > 0) {
        return g_max_threads;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);
    if (n_threads <= 1 || count < 2048) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t block = (count + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t lo = t * block;
        const std::size_t hi = std::min(count, lo + block);
        if (lo >= hi) {
            break;
        }
        workers.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) {
                fn(i);
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
}

} // namespace faceforge

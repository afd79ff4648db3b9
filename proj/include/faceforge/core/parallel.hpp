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
#pragma once

#include <cstddef>
#include <functional>

namespace faceforge {

/// Caps the number of worker threads used by parallel_for. 0 = hardware
/// concurrency. Set once at startup (CLI --threads); not thread-safe itself.
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [0, count). Work is split into contiguous index
/// blocks, so results must not depend on cross-index execution order.
/// Only used where each index writes a disjoint output slot; that keeps
/// every run bit-identical regardless of the thread cap.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace faceforge

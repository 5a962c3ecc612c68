/*
 * Copyright 2026 The Weft Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <vector>

#include "weft/algorithm.hpp"
#include "weft/graph.hpp"

namespace weft {

struct SimulationResult {
  std::vector<std::uint64_t> values;  // by global id
  std::int64_t supersteps = 0;        // counter value when the run concluded
  bool capped = false;
};

// Per-superstep observation hook: superstep index and the current global
// value array (committed state after that superstep's barrier).
using SimulationObserver =
    std::function<void(std::int64_t superstep, const std::vector<std::uint64_t>& values)>;

// Single-threaded BSP reference run over the same partitions and plugin code
// the engine executes: partitions compute in pid order with mirror values one
// superstep behind, exactly like the distributed exchange. No activation
// filtering; full iteration ranges each superstep.
SimulationResult simulate(const GlobalGraph& view, std::span<const std::uint32_t> assignment,
                          std::uint32_t num_partitions, const AlgorithmInfo& info,
                          const AlgorithmParams& params, std::int64_t max_supersteps = 10000,
                          const SimulationObserver& observer = nullptr);

}  // namespace weft

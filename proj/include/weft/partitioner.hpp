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

#include <cstdint>
#include <vector>

#include "weft/graph.hpp"
#include "weft/maas.hpp"
#include "weft/manifest.hpp"

namespace weft {

// Degree-balanced contiguous-range assignment: a greedy prefix-sum cut that
// gives each partition roughly total_degree/p, never consulting the worker
// count. Every partition is non-empty; requires 1 <= p <= v.
std::vector<std::uint32_t> partition_by_degree(const GlobalGraph& graph, std::uint32_t p);

// Remaps and serializes every partition, uploading blobs under part/{pid} and
// the manifest under part/manifest. Deterministic: same graph and p yield
// byte-identical blobs.
PartitionManifest write_partitions(const GlobalGraph& graph,
                                   std::span<const std::uint32_t> assignment, ViewKind view,
                                   MaasClient& maas);

}  // namespace weft

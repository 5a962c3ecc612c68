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

#include "weft/partitioner.hpp"

#include "weft/codec.hpp"
#include "weft/partition.hpp"

namespace weft {

std::vector<std::uint32_t> partition_by_degree(const GlobalGraph& graph, std::uint32_t p) {
  const vid_t v = graph.vertex_count();
  if (p < 1) throw SetupError("partition count must be >= 1");
  if (p > v) throw SetupError("partition count " + std::to_string(p) +
                              " exceeds vertex count " + std::to_string(v));

  const std::uint64_t total = graph.total_degree();
  std::vector<std::uint32_t> assignment(v, 0);

  if (total == 0) {
    // No edges to balance; split the id range evenly by count.
    for (vid_t g = 0; g < v; ++g)
      assignment[g] = static_cast<std::uint32_t>(g * static_cast<std::uint64_t>(p) / v);
    return assignment;
  }

  // Cut the id range where the degree prefix sum crosses each (pid+1)*total/p
  // target, keeping every partition non-empty and leaving one vertex for each
  // partition still to come.
  vid_t next = 0;
  std::uint64_t prefix = 0;
  for (std::uint32_t pid = 0; pid < p; ++pid) {
    const vid_t remaining_parts = p - pid - 1;
    const vid_t limit = v - remaining_parts;
    const double target = static_cast<double>(total) * (pid + 1) / p;
    vid_t taken = 0;
    while (next < limit && (taken == 0 || static_cast<double>(prefix) < target)) {
      prefix += graph.degree(next);
      assignment[next] = pid;
      ++next;
      ++taken;
    }
  }
  for (; next < v; ++next) assignment[next] = p - 1;
  return assignment;
}

PartitionManifest write_partitions(const GlobalGraph& graph,
                                   std::span<const std::uint32_t> assignment, ViewKind view,
                                   MaasClient& maas) {
  std::uint32_t p = 0;
  for (auto a : assignment) p = std::max(p, a + 1);

  PartitionManifest manifest;
  manifest.vertex_count = graph.vertex_count();
  manifest.num_partitions = p;
  manifest.directed = graph.directed();
  manifest.weighted = graph.weighted();
  manifest.view = view;

  for (std::uint32_t pid = 0; pid < p; ++pid) {
    Partition part = remap_partition(graph, assignment, pid, p);
    Bytes blob = serialize_partition(part);
    PartitionEntry e;
    e.pid = pid;
    e.inner_base = part.inner_base();
    e.inner_count = part.inner_count();
    e.edge_count = part.edge_count();
    e.bytes = blob.size();
    e.checksum = fnv1a64(blob);
    manifest.partitions.push_back(e);
    maas.put(keys::part_blob(pid), blob);
  }
  maas.put_string(keys::manifest(), manifest.to_json());
  return manifest;
}

}  // namespace weft

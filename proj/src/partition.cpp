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

#include "weft/partition.hpp"

#include <algorithm>
#include <numeric>

namespace weft {

std::optional<lvid_t> Partition::local_of_global(vid_t g) const {
  auto it = std::lower_bound(inner_globals.begin(), inner_globals.end(), g);
  if (it != inner_globals.end() && *it == g)
    return static_cast<lvid_t>(it - inner_globals.begin());
  return outer_slot_of_global(g);
}

std::optional<lvid_t> Partition::outer_slot_of_global(vid_t g) const {
  auto it = std::lower_bound(outer_globals.begin(), outer_globals.end(), g);
  if (it != outer_globals.end() && *it == g)
    return static_cast<lvid_t>(inner_count() + (it - outer_globals.begin()));
  return std::nullopt;
}

bool Partition::inner_contiguous() const {
  for (std::size_t i = 1; i < inner_globals.size(); ++i)
    if (inner_globals[i] != inner_globals[i - 1] + 1) return false;
  return true;
}

Partition remap_partition(const GlobalGraph& global, std::span<const std::uint32_t> assignment,
                          std::uint32_t pid, std::uint32_t num_partitions) {
  Partition part;
  part.pid = pid;
  part.num_partitions = num_partitions;
  part.directed = global.directed();
  part.weighted = global.weighted();

  for (vid_t g = 0; g < global.vertex_count(); ++g)
    if (assignment[g] == pid) part.inner_globals.push_back(g);

  // Outer set: distinct remote endpoints of inner adjacency.
  std::vector<vid_t> outer;
  for (vid_t g : part.inner_globals)
    for (vid_t w : global.neighbors(g))
      if (assignment[w] != pid) outer.push_back(w);
  std::sort(outer.begin(), outer.end());
  outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
  part.outer_globals = std::move(outer);

  const lvid_t ni = part.inner_count();
  part.adj_offsets.assign(1, 0);
  part.adj_offsets.reserve(ni + 1);

  struct LocalEdge {
    lvid_t dst;
    double w;
  };
  std::vector<LocalEdge> row;
  for (lvid_t l = 0; l < ni; ++l) {
    vid_t g = part.inner_globals[l];
    auto nbrs = global.neighbors(g);
    auto ws = global.edge_weights(g);
    row.clear();
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      row.push_back({*part.local_of_global(nbrs[k]), part.weighted ? ws[k] : 0.0});
    // Global order does not survive the inner/outer split, so rows are
    // re-sorted in local slot order (the codec requires strict ascent).
    std::sort(row.begin(), row.end(),
              [](const LocalEdge& a, const LocalEdge& b) { return a.dst < b.dst; });
    for (const auto& e : row) {
      part.adj_targets.push_back(e.dst);
      if (part.weighted) part.adj_weights.push_back(e.w);
    }
    part.adj_offsets.push_back(part.adj_targets.size());
  }

  // adj_partitions[u] lists the partitions holding u as an outer vertex, the
  // ones an update to u must reach. A partition mirrors u when one of its
  // rows references u, so this walks the transpose; for undirected views it
  // coincides with the owners of u's own neighbors.
  part.adj_partitions.assign(ni, Bitmap(num_partitions));
  for (vid_t x = 0; x < global.vertex_count(); ++x) {
    if (assignment[x] == pid) continue;
    for (vid_t y : global.neighbors(x)) {
      if (assignment[y] != pid) continue;
      auto slot = part.local_of_global(y);
      part.adj_partitions[*slot].set(assignment[x]);
    }
  }
  return part;
}

}  // namespace weft

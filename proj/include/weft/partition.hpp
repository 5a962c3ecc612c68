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

#include <optional>
#include <span>
#include <vector>

#include "weft/bitmap.hpp"
#include "weft/bytes.hpp"
#include "weft/graph.hpp"

namespace weft {

// One subgraph after local remapping. Inner vertices occupy local slots
// [0, inner_count) in ascending global-id order; outer vertices (read-only
// mirrors of remote neighbors) occupy [inner_count, inner_count+outer_count),
// also ascending by global id. Adjacency rows exist for inner vertices only
// and reference local slots. Immutable after construction; per-vertex values
// live in the runtime, not here.
struct Partition {
  std::uint32_t pid = 0;
  std::uint32_t num_partitions = 1;
  bool directed = false;
  bool weighted = false;

  std::vector<vid_t> inner_globals;  // sorted ascending
  std::vector<vid_t> outer_globals;  // sorted ascending

  std::vector<std::uint64_t> adj_offsets{0};  // size inner_count+1
  std::vector<lvid_t> adj_targets;            // local slots
  std::vector<double> adj_weights;            // parallel to targets iff weighted

  // Per inner vertex: the partitions holding it as an outer mirror, i.e. the
  // destinations an update must reach. Width p; the self bit is never set.
  // Equals the owners of the vertex's own neighbors on undirected views.
  std::vector<Bitmap> adj_partitions;

  lvid_t inner_count() const { return static_cast<lvid_t>(inner_globals.size()); }
  lvid_t outer_count() const { return static_cast<lvid_t>(outer_globals.size()); }
  lvid_t local_count() const { return inner_count() + outer_count(); }
  std::uint64_t edge_count() const { return adj_targets.size(); }

  vid_t global_of_local(lvid_t l) const {
    return l < inner_count() ? inner_globals[l] : outer_globals[l - inner_count()];
  }

  std::optional<lvid_t> local_of_global(vid_t g) const;
  std::optional<lvid_t> outer_slot_of_global(vid_t g) const;

  std::span<const lvid_t> neighbors(lvid_t inner) const {
    return {adj_targets.data() + adj_offsets[inner], adj_targets.data() + adj_offsets[inner + 1]};
  }
  std::span<const double> neighbor_weights(lvid_t inner) const {
    if (!weighted) return {};
    return {adj_weights.data() + adj_offsets[inner], adj_weights.data() + adj_offsets[inner + 1]};
  }

  bool inner_contiguous() const;
  vid_t inner_base() const { return inner_globals.empty() ? 0 : inner_globals.front(); }
};

// Remaps one partition out of the global graph. `assignment[g]` is the owning
// partition of global vertex g and must be total. Adjacency rows are re-sorted
// in local slot order; adj_partitions[u] gets bit j iff partition j != pid
// references u (and therefore mirrors it).
Partition remap_partition(const GlobalGraph& global, std::span<const std::uint32_t> assignment,
                          std::uint32_t pid, std::uint32_t num_partitions);

}  // namespace weft

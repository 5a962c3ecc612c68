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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weft/bytes.hpp"

namespace weft {

struct RawEdge {
  vid_t src = 0;
  vid_t dst = 0;
  double weight = 0.0;
};

// Immutable global graph in CSR form. Adjacency lists are sorted by
// destination id and deduplicated; undirected graphs are symmetrized.
class GlobalGraph {
 public:
  GlobalGraph() = default;

  vid_t vertex_count() const { return vertex_count_; }
  std::uint64_t edge_count() const { return targets_.size(); }
  bool directed() const { return directed_; }
  bool weighted() const { return weighted_; }

  std::span<const vid_t> neighbors(vid_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const double> edge_weights(vid_t v) const {
    if (!weighted_) return {};
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }
  std::uint64_t degree(vid_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::uint64_t total_degree() const { return targets_.size(); }

  friend GlobalGraph build_global_graph(std::vector<RawEdge> edges, vid_t vertex_count,
                                        bool directed, bool weighted);

 private:
  vid_t vertex_count_ = 0;
  bool directed_ = false;
  bool weighted_ = false;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<vid_t> targets_;
  std::vector<double> weights_;
};

// Builds the CSR, symmetrizing undirected input and deduplicating multi-edges
// (first weight wins). Self-loops are kept. Endpoints must be < vertex_count.
GlobalGraph build_global_graph(std::vector<RawEdge> edges, vid_t vertex_count, bool directed,
                               bool weighted);

// Per-algorithm traversal views of an ingested graph. A partition upload is
// built for exactly one view; the blob format carries a single adjacency
// section, so direction-sensitive algorithms get their own upload.
enum class ViewKind : std::uint8_t {
  AsIs,        // adjacency as declared (out-edges for directed graphs)
  Undirected,  // symmetrized, deduplicated
  Reverse,     // transposed; pull-style traversal over in-edges
  PageRank,    // transposed + weight 1/outdeg(u) per in-edge, weight-0
               // self-loop marking dangling vertices
};

std::string view_name(ViewKind v);
std::optional<ViewKind> parse_view(const std::string& name);

GlobalGraph build_view(const GlobalGraph& g, ViewKind kind);

// Seeded Erdos-Renyi-style generator used by tests and the bench harness.
GlobalGraph random_graph(vid_t n, double avg_degree, bool directed, bool weighted,
                         std::uint64_t seed);

// Edge-list text ingestion: one `src dst [weight]` per line, `#` comments
// ignored; optional vertex file with one external id per line (defines the
// vertex set, including isolated vertices). External ids are densified; the
// returned map lists the external id of each dense global id.
struct IngestedGraph {
  GlobalGraph graph;
  std::vector<vid_t> external_ids;  // external_ids[global] = external id
};

IngestedGraph load_edge_list(const std::string& edge_path, bool directed, bool weighted,
                             const std::optional<std::string>& vertex_path = std::nullopt);

}  // namespace weft

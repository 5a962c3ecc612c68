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

#include "weft/graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace weft {

GlobalGraph build_global_graph(std::vector<RawEdge> edges, vid_t vertex_count, bool directed,
                               bool weighted) {
  for (const auto& e : edges) {
    if (e.src >= vertex_count || e.dst >= vertex_count)
      throw IngestError("edge endpoint " +
                        std::to_string(std::max(e.src, e.dst)) +
                        " >= declared vertex count " + std::to_string(vertex_count));
  }
  if (!directed) {
    std::size_t n = edges.size();
    edges.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      if (edges[i].src != edges[i].dst)
        edges.push_back({edges[i].dst, edges[i].src, edges[i].weight});
    }
  }
  // Stable sort keeps the first occurrence of a duplicate edge, so its weight
  // wins the dedup below.
  std::stable_sort(edges.begin(), edges.end(), [](const RawEdge& a, const RawEdge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });

  GlobalGraph g;
  g.vertex_count_ = vertex_count;
  g.directed_ = directed;
  g.weighted_ = weighted;
  g.offsets_.assign(1, 0);
  g.offsets_.reserve(vertex_count + 1);
  g.targets_.reserve(edges.size());
  if (weighted) g.weights_.reserve(edges.size());

  std::size_t i = 0;
  for (vid_t v = 0; v < vertex_count; ++v) {
    while (i < edges.size() && edges[i].src == v) {
      bool dup = g.targets_.size() > g.offsets_[v] && g.targets_.back() == edges[i].dst;
      if (!dup) {
        g.targets_.push_back(edges[i].dst);
        if (weighted) g.weights_.push_back(edges[i].weight);
      }
      ++i;
    }
    g.offsets_.push_back(g.targets_.size());
  }
  return g;
}

std::string view_name(ViewKind v) {
  switch (v) {
    case ViewKind::AsIs: return "as-is";
    case ViewKind::Undirected: return "undirected";
    case ViewKind::Reverse: return "reverse";
    case ViewKind::PageRank: return "pagerank";
  }
  return "?";
}

std::optional<ViewKind> parse_view(const std::string& name) {
  if (name == "as-is") return ViewKind::AsIs;
  if (name == "undirected") return ViewKind::Undirected;
  if (name == "reverse") return ViewKind::Reverse;
  if (name == "pagerank") return ViewKind::PageRank;
  return std::nullopt;
}

GlobalGraph build_view(const GlobalGraph& g, ViewKind kind) {
  const vid_t n = g.vertex_count();
  std::vector<RawEdge> edges;
  edges.reserve(g.edge_count());
  switch (kind) {
    case ViewKind::AsIs: {
      for (vid_t u = 0; u < n; ++u) {
        auto nbrs = g.neighbors(u);
        auto ws = g.edge_weights(u);
        for (std::size_t k = 0; k < nbrs.size(); ++k)
          edges.push_back({u, nbrs[k], g.weighted() ? ws[k] : 0.0});
      }
      return build_global_graph(std::move(edges), n, g.directed(), g.weighted());
    }
    case ViewKind::Undirected: {
      for (vid_t u = 0; u < n; ++u)
        for (vid_t w : g.neighbors(u)) edges.push_back({u, w, 0.0});
      return build_global_graph(std::move(edges), n, /*directed=*/false, /*weighted=*/false);
    }
    case ViewKind::Reverse: {
      // For undirected graphs the stored CSR is already symmetric, so the
      // transposed pair set equals the original and no extra pass is needed.
      for (vid_t u = 0; u < n; ++u)
        for (vid_t w : g.neighbors(u)) edges.push_back({w, u, 0.0});
      return build_global_graph(std::move(edges), n, /*directed=*/true, /*weighted=*/false);
    }
    case ViewKind::PageRank: {
      // Row v lists its in-neighbors u, each carrying 1/outdeg(u); a dangling
      // u gets a weight-0 self-loop so its owner can detect it locally.
      std::vector<std::uint64_t> outdeg(n, 0);
      for (vid_t u = 0; u < n; ++u) outdeg[u] = g.degree(u);
      for (vid_t u = 0; u < n; ++u)
        for (vid_t w : g.neighbors(u))
          edges.push_back({w, u, 1.0 / static_cast<double>(outdeg[u])});
      for (vid_t u = 0; u < n; ++u)
        if (outdeg[u] == 0) edges.push_back({u, u, 0.0});
      return build_global_graph(std::move(edges), n, /*directed=*/true, /*weighted=*/true);
    }
  }
  throw SetupError("unknown view");
}

GlobalGraph random_graph(vid_t n, double avg_degree, bool directed, bool weighted,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<vid_t> pick(0, n - 1);
  std::uniform_real_distribution<double> wdist(0.5, 2.0);
  std::uint64_t m = static_cast<std::uint64_t>(static_cast<double>(n) * avg_degree /
                                               (directed ? 1.0 : 2.0));
  std::vector<RawEdge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    vid_t a = pick(rng), b = pick(rng);
    edges.push_back({a, b, weighted ? wdist(rng) : 0.0});
  }
  return build_global_graph(std::move(edges), n, directed, weighted);
}

IngestedGraph load_edge_list(const std::string& edge_path, bool directed, bool weighted,
                             const std::optional<std::string>& vertex_path) {
  std::unordered_map<vid_t, vid_t> dense;  // external -> global
  std::vector<vid_t> external;
  bool declared_vertices = vertex_path.has_value();

  if (declared_vertices) {
    std::ifstream vf(*vertex_path);
    if (!vf) throw IngestError("cannot open vertex file " + *vertex_path);
    std::string line;
    while (std::getline(vf, line)) {
      if (line.empty() || line[0] == '#') continue;
      vid_t ext = 0;
      std::istringstream ss(line);
      if (!(ss >> ext)) throw IngestError("bad vertex line: " + line);
      if (dense.emplace(ext, external.size()).second) external.push_back(ext);
    }
  }

  std::ifstream ef(edge_path);
  if (!ef) throw IngestError("cannot open edge file " + edge_path);

  struct ExtEdge {
    vid_t src, dst;
    double w;
  };
  std::vector<ExtEdge> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ef, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    vid_t s, d;
    if (!(ss >> s >> d)) throw IngestError("bad edge at line " + std::to_string(lineno));
    double w = 0.0;
    if (ss >> w) {
      if (!weighted)
        throw IngestError("weight on unweighted graph at line " + std::to_string(lineno));
    } else if (weighted) {
      throw IngestError("missing weight at line " + std::to_string(lineno));
    }
    raw.push_back({s, d, w});
  }

  if (!declared_vertices) {
    // Vertex set = edge endpoints; dense ids assigned in sorted external order
    // so ingestion is deterministic.
    std::vector<vid_t> ids;
    ids.reserve(raw.size() * 2);
    for (const auto& e : raw) {
      ids.push_back(e.src);
      ids.push_back(e.dst);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    external = ids;
    for (vid_t g = 0; g < external.size(); ++g) dense[external[g]] = g;
  }

  std::vector<RawEdge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    auto si = dense.find(e.src);
    auto di = dense.find(e.dst);
    if (si == dense.end() || di == dense.end())
      throw IngestError("edge endpoint not in declared vertex set");
    edges.push_back({si->second, di->second, e.w});
  }

  IngestedGraph out;
  out.graph = build_global_graph(std::move(edges), external.size(), directed, weighted);
  out.external_ids = std::move(external);
  return out;
}

}  // namespace weft

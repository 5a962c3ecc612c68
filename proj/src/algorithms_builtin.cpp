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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "weft/algorithm.hpp"

namespace weft {
namespace {

std::int64_t param_i64(const AlgorithmParams& params, const std::string& key,
                       std::int64_t fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::int64_t v = 0;
  auto res = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
    throw SetupError("parameter " + key + " is not an integer: " + it->second);
  return v;
}

double param_f64(const AlgorithmParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw SetupError("parameter " + key + " is not a number: " + it->second);
  }
}

void reject_unknown(const AlgorithmParams& params, std::initializer_list<const char*> known,
                    const std::string& algo) {
  for (const auto& entry : params) {
    const std::string& key = entry.first;
    if (std::find_if(known.begin(), known.end(), [&](const char* s) { return key == s; }) ==
        known.end())
      throw SetupError("unknown parameter for " + algo + ": " + key);
  }
}

// Hop distance from a root, pull-style: a vertex relaxes from neighbors it
// can see locally, which is why directed runs use the reverse view.
class Bfs : public Algorithm {
 public:
  explicit Bfs(vid_t root) : root_(root) {}

  void peval(StepContext& ctx) override {
    auto slot = ctx.partition().local_of_global(root_);
    if (slot && *slot < ctx.partition().inner_count()) ctx.set_value(*slot, value_from_i64(0));
    sweep(ctx);
  }

  void incval(StepContext& ctx) override { sweep(ctx); }

 private:
  static void sweep(StepContext& ctx) {
    for (lvid_t v : ctx.vertex_range()) {
      std::int64_t best = value_as_i64(ctx.get_value(v));
      for (lvid_t w : ctx.edges(v)) {
        std::int64_t nv = value_as_i64(ctx.get_value(w));
        if (nv != kUnreachable && nv + 1 < best) best = nv + 1;
      }
      if (best < value_as_i64(ctx.get_value(v))) ctx.set_value(v, value_from_i64(best));
    }
  }

  vid_t root_;
};

// Min-label propagation; converges when no value changes.
class Wcc : public Algorithm {
 public:
  void peval(StepContext& ctx) override {
    ctx.initialize_state_as_id();
    propagate(ctx);
  }

  void incval(StepContext& ctx) override { propagate(ctx); }

 private:
  static void propagate(StepContext& ctx) {
    for (lvid_t v : ctx.vertex_range()) {
      std::int64_t l = value_as_i64(ctx.get_value(v));
      for (lvid_t w : ctx.edges(v)) l = std::min(l, value_as_i64(ctx.get_value(w)));
      if (l < value_as_i64(ctx.get_value(v))) ctx.set_value(v, value_from_i64(l));
    }
  }
};

// Synchronous label propagation: every vertex adopts the most frequent label
// among its neighbors' previous-superstep labels, ties to the minimum. The
// two-pass shape keeps the round synchronous inside a partition.
class Cdlp : public Algorithm {
 public:
  explicit Cdlp(std::int64_t max_iterations) : max_iterations_(max_iterations) {}

  void peval(StepContext& ctx) override { ctx.initialize_state_as_id(); }

  void incval(StepContext& ctx) override {
    std::vector<std::pair<lvid_t, std::int64_t>> updates;
    std::vector<std::int64_t> labels;
    for (lvid_t v : ctx.vertex_range()) {
      auto nbrs = ctx.edges(v);
      if (nbrs.empty()) continue;
      labels.clear();
      for (lvid_t w : nbrs) labels.push_back(value_as_i64(ctx.get_value(w)));
      std::sort(labels.begin(), labels.end());
      std::int64_t best_label = labels[0];
      std::size_t best_count = 0;
      std::size_t i = 0;
      while (i < labels.size()) {
        std::size_t j = i;
        while (j < labels.size() && labels[j] == labels[i]) ++j;
        if (j - i > best_count) {  // strict: ties keep the smaller label
          best_count = j - i;
          best_label = labels[i];
        }
        i = j;
      }
      if (best_label != value_as_i64(ctx.get_value(v))) updates.emplace_back(v, best_label);
    }
    for (const auto& [v, l] : updates) ctx.set_value(v, value_from_i64(l));
    if (ctx.superstep() >= max_iterations_) ctx.signal_terminate();
  }

 private:
  std::int64_t max_iterations_;
};

// Power iteration with damping over the pagerank view: a row lists the
// vertex's in-neighbors, each edge weighted 1/outdeg of the source; a
// weight-0 self-loop marks a dangling vertex, whose mass is redistributed
// uniformly through the previous superstep's global sum.
class PageRank : public Algorithm {
 public:
  PageRank(std::int64_t iterations, double damping)
      : iterations_(iterations), damping_(damping) {}

  void peval(StepContext& ctx) override {
    const double r0 = 1.0 / static_cast<double>(ctx.global_vertex_count());
    for (lvid_t v = 0; v < ctx.partition().inner_count(); ++v) {
      ctx.set_value(v, value_from_f64(r0));
      if (is_dangling(ctx, v)) ctx.add_to_global_sum(r0);
    }
  }

  void incval(StepContext& ctx) override {
    const double n = static_cast<double>(ctx.global_vertex_count());
    const double dangling = ctx.global_sum();
    const double base = (1.0 - damping_) / n + damping_ * dangling / n;

    // Every rank depends on the global dangling sum, so the activation
    // filter cannot safely skip vertices here; the full range recomputes.
    std::vector<std::pair<lvid_t, double>> updates;
    updates.reserve(ctx.partition().inner_count());
    for (lvid_t v = 0; v < ctx.partition().inner_count(); ++v) {
      auto nbrs = ctx.edges(v);
      auto ws = ctx.edge_weights(v);
      double sum = 0.0;
      for (std::size_t k = 0; k < nbrs.size(); ++k)
        if (ws[k] > 0.0) sum += ws[k] * value_as_f64(ctx.get_value(nbrs[k]));
      updates.emplace_back(v, base + damping_ * sum);
    }
    double dangling_next = 0.0;
    for (const auto& [v, r] : updates) {
      ctx.set_value(v, value_from_f64(r));
      if (is_dangling(ctx, v)) dangling_next += r;
    }
    if (dangling_next != 0.0) ctx.add_to_global_sum(dangling_next);
    if (ctx.superstep() >= iterations_) ctx.signal_terminate();
  }

 private:
  static bool is_dangling(const StepContext& ctx, lvid_t v) {
    auto nbrs = ctx.edges(v);
    auto ws = ctx.edge_weights(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (nbrs[k] == v && ws[k] == 0.0) return true;
    return false;
  }

  std::int64_t iterations_;
  double damping_;
};

}  // namespace

namespace detail {

void register_builtin_algorithms() {
  {
    AlgorithmInfo info;
    info.name = "BFS";
    info.value_width = 8;
    info.initial_value = value_from_i64(kUnreachable);
    info.required_view = [](bool directed) {
      return directed ? ViewKind::Reverse : ViewKind::AsIs;
    };
    info.factory = [](const AlgorithmParams& params, const GraphMeta& meta) {
      reject_unknown(params, {"root"}, "BFS");
      std::int64_t root = param_i64(params, "root", 0);
      if (root < 0 || static_cast<vid_t>(root) >= meta.vertex_count)
        throw SetupError("BFS root " + std::to_string(root) + " out of range");
      return std::make_unique<Bfs>(static_cast<vid_t>(root));
    };
    add_algorithm(std::move(info));
  }
  {
    AlgorithmInfo info;
    info.name = "WCC";
    info.value_width = 8;
    info.initial_value = value_from_i64(kUnreachable);
    info.required_view = [](bool) { return ViewKind::Undirected; };
    info.factory = [](const AlgorithmParams& params, const GraphMeta&) {
      reject_unknown(params, {}, "WCC");
      return std::make_unique<Wcc>();
    };
    add_algorithm(std::move(info));
  }
  {
    AlgorithmInfo info;
    info.name = "CDLP";
    info.value_width = 8;
    info.initial_value = value_from_i64(kUnreachable);
    info.required_view = [](bool) { return ViewKind::Undirected; };
    info.factory = [](const AlgorithmParams& params, const GraphMeta&) {
      reject_unknown(params, {"max_iterations"}, "CDLP");
      std::int64_t iters = param_i64(params, "max_iterations", 10);
      if (iters < 1) throw SetupError("CDLP max_iterations must be >= 1");
      return std::make_unique<Cdlp>(iters);
    };
    add_algorithm(std::move(info));
  }
  {
    AlgorithmInfo info;
    info.name = "PAGERANK";
    info.value_width = 8;
    info.initial_value = value_from_f64(0.0);
    info.uses_global_sum = true;
    info.float_valued = true;
    info.required_view = [](bool) { return ViewKind::PageRank; };
    info.factory = [](const AlgorithmParams& params, const GraphMeta&) {
      reject_unknown(params, {"iterations", "damping"}, "PAGERANK");
      std::int64_t iters = param_i64(params, "iterations", 10);
      double damping = param_f64(params, "damping", 0.85);
      if (iters < 1) throw SetupError("PAGERANK iterations must be >= 1");
      if (!(damping > 0.0 && damping < 1.0))
        throw SetupError("PAGERANK damping must be in (0, 1)");
      return std::make_unique<PageRank>(iters, damping);
    };
    add_algorithm(std::move(info));
  }
}

}  // namespace detail
}  // namespace weft

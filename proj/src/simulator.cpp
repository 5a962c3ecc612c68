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

#include "weft/simulator.hpp"

#include <numeric>

#include "weft/partition.hpp"

namespace weft {

namespace {

struct SimPartition {
  Partition part;
  std::vector<std::uint64_t> values;      // inner + outer slots
  std::vector<std::uint32_t> slot_index;  // identity
  std::vector<lvid_t> full_range;
};

class SimSink : public StepSink {
 public:
  SimPartition* sp = nullptr;
  std::vector<std::pair<vid_t, std::uint64_t>>* changes = nullptr;
  double global_sum = 0.0;
  bool terminated = false;

  void on_change(lvid_t inner, std::uint64_t new_value) override {
    changes->emplace_back(sp->part.global_of_local(inner), new_value);
  }
  void add_global_sum(double x) override { global_sum += x; }
  void signal_terminate() override { terminated = true; }
};

}  // namespace

SimulationResult simulate(const GlobalGraph& view, std::span<const std::uint32_t> assignment,
                          std::uint32_t num_partitions, const AlgorithmInfo& info,
                          const AlgorithmParams& params, std::int64_t max_supersteps,
                          const SimulationObserver& observer) {
  GraphMeta meta{view.vertex_count(), view.directed(), view.weighted()};
  auto algorithm = info.factory(params, meta);

  std::vector<SimPartition> parts(num_partitions);
  // Mirror delivery lists: for each global id, the (partition, outer slot)
  // pairs that hold it as a read-only copy.
  std::vector<std::vector<std::pair<std::uint32_t, lvid_t>>> mirrors(view.vertex_count());

  for (std::uint32_t pid = 0; pid < num_partitions; ++pid) {
    SimPartition& sp = parts[pid];
    sp.part = remap_partition(view, assignment, pid, num_partitions);
    sp.values.assign(sp.part.local_count(), info.initial_value);
    sp.slot_index.resize(sp.part.local_count());
    std::iota(sp.slot_index.begin(), sp.slot_index.end(), 0);
    sp.full_range.resize(sp.part.inner_count());
    std::iota(sp.full_range.begin(), sp.full_range.end(), 0);
    for (lvid_t o = 0; o < sp.part.outer_count(); ++o)
      mirrors[sp.part.outer_globals[o]].emplace_back(pid, sp.part.inner_count() + o);
  }

  SimulationResult result;
  double global_sum_prev = 0.0;
  std::int64_t superstep = 0;

  while (true) {
    std::vector<std::pair<vid_t, std::uint64_t>> changes;
    double global_sum_next = 0.0;
    bool terminated = false;

    for (std::uint32_t pid = 0; pid < num_partitions; ++pid) {
      SimPartition& sp = parts[pid];
      SimSink sink;
      sink.sp = &sp;
      sink.changes = &changes;
      StepContext ctx(sp.part, sp.values.data(), sp.slot_index.data(), sp.full_range, superstep,
                      view.vertex_count(), global_sum_prev, sink);
      if (superstep == 0)
        algorithm->peval(ctx);
      else
        algorithm->incval(ctx);
      global_sum_next += sink.global_sum;
      terminated |= sink.terminated;
    }

    // Barrier: committed changes become visible through mirrors.
    for (const auto& [g, v] : changes)
      for (const auto& [pid, slot] : mirrors[g]) parts[pid].values[slot] = v;
    global_sum_prev = global_sum_next;

    if (observer) {
      std::vector<std::uint64_t> snapshot(view.vertex_count());
      for (const auto& sp : parts)
        for (lvid_t l = 0; l < sp.part.inner_count(); ++l)
          snapshot[sp.part.inner_globals[l]] = sp.values[l];
      observer(superstep, snapshot);
    }

    bool keep = !changes.empty() && !terminated;
    if (!keep) break;
    if (superstep + 1 >= max_supersteps) {
      result.capped = true;
      break;
    }
    ++superstep;
  }

  result.supersteps = superstep;
  result.values.assign(view.vertex_count(), info.initial_value);
  for (const auto& sp : parts)
    for (lvid_t l = 0; l < sp.part.inner_count(); ++l)
      result.values[sp.part.inner_globals[l]] = sp.values[l];
  return result;
}

}  // namespace weft

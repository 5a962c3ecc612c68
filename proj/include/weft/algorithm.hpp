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
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weft/bytes.hpp"
#include "weft/partition.hpp"

namespace weft {

using AlgorithmParams = std::map<std::string, std::string>;

struct GraphMeta {
  vid_t vertex_count = 0;
  bool directed = false;
  bool weighted = false;
};

// Receives a partition's staged changes and aggregate contributions. The
// engine and the sequential simulator provide different sinks behind the same
// contract: a stored change becomes visible to other partitions only after
// the superstep barrier.
class StepSink {
 public:
  virtual ~StepSink() = default;
  virtual void on_change(lvid_t inner, std::uint64_t new_value) = 0;
  virtual void add_global_sum(double x) = 0;
  virtual void signal_terminate() = 0;
};

// Per-partition, per-superstep view handed to PEval/IncVal. Values are raw
// 64-bit patterns; SetValue is permitted on inner vertices only, GetValue on
// inner and outer. Writes that do not change the stored pattern are ignored.
class StepContext {
 public:
  StepContext(const Partition& part, std::uint64_t* storage, const std::uint32_t* slot_index,
              std::span<const lvid_t> iteration_set, std::int64_t superstep, vid_t global_n,
              double global_sum_prev, StepSink& sink)
      : part_(part),
        storage_(storage),
        slot_index_(slot_index),
        iteration_set_(iteration_set),
        superstep_(superstep),
        global_n_(global_n),
        global_sum_prev_(global_sum_prev),
        sink_(sink) {}

  const Partition& partition() const { return part_; }
  std::int64_t superstep() const { return superstep_; }
  vid_t global_vertex_count() const { return global_n_; }

  // Iteration set over inner vertices: the full range, or the active subset
  // once superstep-aware activation is in effect.
  std::span<const lvid_t> vertex_range() const { return iteration_set_; }

  std::uint64_t get_value(lvid_t local) const { return storage_[slot_index_[local]]; }

  void set_value(lvid_t inner, std::uint64_t value) {
    if (inner >= part_.inner_count())
      throw std::logic_error("set_value on non-inner vertex slot");
    std::uint64_t& slot = storage_[slot_index_[inner]];
    if (slot == value) return;
    slot = value;
    sink_.on_change(inner, value);
  }

  std::span<const lvid_t> edges(lvid_t inner) const { return part_.neighbors(inner); }
  std::span<const double> edge_weights(lvid_t inner) const {
    return part_.neighbor_weights(inner);
  }

  vid_t global_id(lvid_t local) const { return part_.global_of_local(local); }

  // Sets every inner vertex's value to its own global id.
  void initialize_state_as_id() {
    for (lvid_t l = 0; l < part_.inner_count(); ++l)
      set_value(l, value_from_i64(static_cast<std::int64_t>(part_.global_of_local(l))));
  }

  // Previous superstep's job-wide aggregate (0.0 before any contribution).
  double global_sum() const { return global_sum_prev_; }
  void add_to_global_sum(double x) { sink_.add_global_sum(x); }

  // Suppresses further supersteps for this partition regardless of activity.
  void signal_terminate() { sink_.signal_terminate(); }

 private:
  const Partition& part_;
  std::uint64_t* storage_;
  const std::uint32_t* slot_index_;
  std::span<const lvid_t> iteration_set_;
  std::int64_t superstep_;
  vid_t global_n_;
  double global_sum_prev_;
  StepSink& sink_;
};

// A PEval/IncVal pair instantiated per job from registered parameters.
class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual void peval(StepContext& ctx) = 0;
  virtual void incval(StepContext& ctx) = 0;
};

struct AlgorithmInfo {
  std::string name;
  std::uint8_t value_width = 8;  // 4 or 8
  std::uint64_t initial_value = 0;
  bool uses_global_sum = false;
  bool float_valued = false;
  // The traversal view a partition upload must carry for this algorithm.
  std::function<ViewKind(bool directed)> required_view;
  // Validates params and builds a job-scoped instance.
  std::function<std::unique_ptr<Algorithm>(const AlgorithmParams&, const GraphMeta&)> factory;
};

// Name-keyed registry; lookups are exact and case-sensitive. The four
// built-ins (BFS, PAGERANK, CDLP, WCC) are registered on first use.
void register_algorithm(AlgorithmInfo info);
const AlgorithmInfo& lookup_algorithm(const std::string& name);
std::vector<std::string> algorithm_names();

namespace detail {
// Registry insert without the built-in bootstrap; used by the built-ins
// themselves during registration.
void add_algorithm(AlgorithmInfo info);
void register_builtin_algorithms();
}  // namespace detail

constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max();

}  // namespace weft

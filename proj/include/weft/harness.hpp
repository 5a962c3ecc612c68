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
#include <ostream>
#include <string>
#include <vector>

#include "weft/coordinator.hpp"
#include "weft/graph.hpp"
#include "weft/simulator.hpp"

namespace weft {

// Uploads the algorithm's required view of `input` into `target` with a
// degree-balanced assignment; returns the manifest.
PartitionManifest prepare_job_input(const GlobalGraph& input, const std::string& algorithm,
                                    std::uint32_t partitions, MaasClient& maas);

bool values_match(const AlgorithmInfo& info, std::uint64_t engine_value,
                  std::uint64_t oracle_value);

struct VertexDiff {
  vid_t vertex = 0;
  std::uint64_t engine_value = 0;
  std::uint64_t oracle_value = 0;
};

struct VerifyResult {
  bool pass = false;
  std::optional<VertexDiff> first_diff;
  std::int64_t engine_supersteps = 0;
  std::int64_t oracle_supersteps = 0;
  JobResult engine;
  SimulationResult oracle;
};

// Runs the engine and the sequential reference on the same input and
// compares per-vertex values (exact for integer algorithms, 1e-6 relative
// for float-valued ones).
VerifyResult verify(const GlobalGraph& input, const JobConfig& config,
                    MetricsRegistry* registry = nullptr);

// Compares an engine result against a precomputed oracle run.
VerifyResult diff_results(const AlgorithmInfo& info, JobResult engine, SimulationResult oracle);

// One bench matrix entry: a job config plus its input graph.
struct BenchSpec {
  std::string name;
  JobConfig config;
  // Synthetic input; a non-empty edge_file takes precedence.
  std::string edge_file;
  bool directed = false;
  bool weighted = false;
  vid_t n = 1000;
  double avg_degree = 8.0;
  std::uint64_t seed = 1;
};

std::vector<BenchSpec> load_bench_specs(const std::string& path);

// Runs every spec and appends one line per run to `report`:
//   name hash algorithm mode p W t supersteps wall core_s gb_s msg_ops msg_bytes
void run_bench(const std::vector<BenchSpec>& specs, std::ostream& report);

}  // namespace weft

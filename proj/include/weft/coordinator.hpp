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

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "weft/algorithm.hpp"
#include "weft/manifest.hpp"
#include "weft/maas.hpp"
#include "weft/metrics.hpp"

namespace weft {

enum class ExecutionMode { Pinned, Rotating };

struct JobConfig {
  std::string algorithm;
  std::uint32_t partitions = 1;
  std::uint32_t max_worker = 1;
  std::uint32_t threads = 1;
  std::optional<std::uint32_t> activation_start;  // nullopt = activation off
  bool key_aggregation = true;
  bool colocation_dedup = true;
  bool preload = true;
  std::string maas_uri = "mem://";
  AlgorithmParams params;
  std::string compression = "identity";

  std::chrono::microseconds poll_interval{0};  // 0 = backend default
  std::chrono::milliseconds barrier_timeout{30000};
  std::int64_t max_supersteps = 10000;
  double memory_gb = 2.0;

  // Pinned when the worker pool can keep every partition resident.
  ExecutionMode mode() const {
    return static_cast<std::uint64_t>(max_worker) * threads >= partitions
               ? ExecutionMode::Pinned
               : ExecutionMode::Rotating;
  }
  std::uint32_t workers_launched() const { return std::min(max_worker, partitions); }
  // Pinned-mode static assignment: round-robin by partition id.
  std::uint32_t owner_worker(std::uint32_t pid) const { return pid % workers_launched(); }

  std::chrono::microseconds effective_poll(bool mem_backend) const {
    if (poll_interval.count() > 0) return poll_interval;
    return mem_backend ? std::chrono::microseconds(2000) : std::chrono::microseconds(20000);
  }

  void validate() const;
  std::string to_json() const;
  static JobConfig from_json(const std::string& text);
};

struct JobResult {
  std::vector<std::uint64_t> values;  // by global id
  std::uint8_t value_width = 8;
  bool float_valued = false;
  std::int64_t supersteps = 0;
  bool capped = false;
  RunReport report;
};

// Launches worker tasks. Thread launcher runs them in-process; the process
// launcher executes `<self> worker ...` so separate OS processes share a
// file:// store. Join rethrows in-process failures and reports child exits.
class WorkerLauncher {
 public:
  virtual ~WorkerLauncher() = default;
  virtual void launch(const JobConfig& config, const MaasTarget& target,
                      MetricsRegistry* registry, std::uint32_t worker_id) = 0;
  virtual void join_all() = 0;
};

std::unique_ptr<WorkerLauncher> make_thread_launcher();
std::unique_ptr<WorkerLauncher> make_process_launcher(std::string self_exe);

// Superstep protocol, step by step. run_job drives the whole loop:
// init -> invoke -> (barrier -> advance)* -> gather.
class Coordinator {
 public:
  Coordinator(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry);

  void init_job();
  void invoke_workers(WorkerLauncher& launcher);

  struct BarrierSummary {
    std::int64_t superstep = 0;
    bool keep_computing = false;
    bool terminate = false;
  };
  BarrierSummary barrier_wait();

  enum class Advance { Continue, Done };
  Advance advance_or_finish(const BarrierSummary& summary);

  std::int64_t superstep() const { return superstep_; }

 private:
  void abort_job(const std::string& reason);
  void sweep_previous_run(const PartitionManifest& manifest);

  const JobConfig& config_;
  const MaasTarget& target_;
  MetricsRegistry* registry_;
  std::unique_ptr<InstrumentedMaas> maas_;
  bool mem_backend_;
  std::int64_t superstep_ = 0;
};

JobResult run_job(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry,
                  WorkerLauncher& launcher);

// Convenience: thread launcher, fresh registry if none supplied.
JobResult run_job(const JobConfig& config, const MaasTarget& target,
                  MetricsRegistry* registry = nullptr);

}  // namespace weft

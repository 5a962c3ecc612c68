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

#include "weft/coordinator.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <json.hpp>
#include <thread>

#include "weft/codec.hpp"
#include "weft/worker.hpp"

namespace weft {

using Clock = std::chrono::steady_clock;

void JobConfig::validate() const {
  if (algorithm.empty()) throw SetupError("algorithm name required");
  if (partitions < 1) throw SetupError("partitions must be >= 1");
  if (max_worker < 1) throw SetupError("max_worker must be >= 1");
  if (threads < 1) throw SetupError("threads must be >= 1");
  if (max_supersteps < 1) throw SetupError("max_supersteps must be >= 1");
}

std::string JobConfig::to_json() const {
  nlohmann::json j;
  j["algorithm"] = algorithm;
  j["partitions"] = partitions;
  j["max_worker"] = max_worker;
  j["threads"] = threads;
  if (activation_start) j["activation_start"] = *activation_start;
  j["key_aggregation"] = key_aggregation;
  j["colocation_dedup"] = colocation_dedup;
  j["preload"] = preload;
  j["maas_uri"] = maas_uri;
  j["params"] = params;
  j["compression"] = compression;
  j["poll_us"] = poll_interval.count();
  j["barrier_timeout_ms"] = barrier_timeout.count();
  j["max_supersteps"] = max_supersteps;
  j["memory_gb"] = memory_gb;
  return j.dump();
}

JobConfig JobConfig::from_json(const std::string& text) {
  JobConfig c;
  try {
    auto j = nlohmann::json::parse(text);
    c.algorithm = j.at("algorithm").get<std::string>();
    c.partitions = j.at("partitions").get<std::uint32_t>();
    c.max_worker = j.at("max_worker").get<std::uint32_t>();
    c.threads = j.at("threads").get<std::uint32_t>();
    if (j.contains("activation_start"))
      c.activation_start = j["activation_start"].get<std::uint32_t>();
    c.key_aggregation = j.value("key_aggregation", true);
    c.colocation_dedup = j.value("colocation_dedup", true);
    c.preload = j.value("preload", true);
    c.maas_uri = j.value("maas_uri", std::string("mem://"));
    if (j.contains("params")) c.params = j["params"].get<AlgorithmParams>();
    c.compression = j.value("compression", std::string("identity"));
    c.poll_interval = std::chrono::microseconds(j.value("poll_us", 0));
    c.barrier_timeout = std::chrono::milliseconds(j.value("barrier_timeout_ms", 30000));
    c.max_supersteps = j.value("max_supersteps", 10000);
    c.memory_gb = j.value("memory_gb", 2.0);
  } catch (const nlohmann::json::exception& ex) {
    throw SetupError(std::string("malformed job config: ") + ex.what());
  }
  return c;
}

// ---------------------------------------------------------------------------

namespace {

class ThreadLauncher : public WorkerLauncher {
 public:
  void launch(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry,
              std::uint32_t worker_id) override {
    auto slot = std::make_unique<Slot>();
    Slot* raw = slot.get();
    raw->thread = std::thread([&config, &target, registry, worker_id, raw] {
      try {
        worker_main(config, target, registry, worker_id);
      } catch (...) {
        raw->error = std::current_exception();
      }
    });
    slots_.push_back(std::move(slot));
  }

  void join_all() override {
    std::exception_ptr first;
    for (auto& s : slots_) {
      if (s->thread.joinable()) s->thread.join();
      if (s->error && !first) first = s->error;
    }
    slots_.clear();
    if (first) std::rethrow_exception(first);
  }

  ~ThreadLauncher() override {
    for (auto& s : slots_)
      if (s->thread.joinable()) s->thread.join();
  }

 private:
  struct Slot {
    std::thread thread;
    std::exception_ptr error;
  };
  std::vector<std::unique_ptr<Slot>> slots_;
};

class ProcessLauncher : public WorkerLauncher {
 public:
  explicit ProcessLauncher(std::string self_exe) : self_exe_(std::move(self_exe)) {}

  void launch(const JobConfig& config, const MaasTarget& target, MetricsRegistry*,
              std::uint32_t worker_id) override {
    (void)config;
    pid_t pid = ::fork();
    if (pid < 0) throw SetupError("fork failed");
    if (pid == 0) {
      std::string wid = std::to_string(worker_id);
      ::execl(self_exe_.c_str(), self_exe_.c_str(), "worker", "--maas", target.uri.c_str(),
              "--worker-id", wid.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    pids_.push_back(pid);
  }

  void join_all() override {
    std::string failure;
    for (pid_t pid : pids_) {
      int status = 0;
      ::waitpid(pid, &status, 0);
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        failure = "worker process " + std::to_string(pid) + " failed";
    }
    pids_.clear();
    if (!failure.empty()) throw StorageError(failure);
  }

 private:
  std::string self_exe_;
  std::vector<pid_t> pids_;
};

}  // namespace

std::unique_ptr<WorkerLauncher> make_thread_launcher() {
  return std::make_unique<ThreadLauncher>();
}

std::unique_ptr<WorkerLauncher> make_process_launcher(std::string self_exe) {
  return std::make_unique<ProcessLauncher>(std::move(self_exe));
}

// ---------------------------------------------------------------------------

Coordinator::Coordinator(const JobConfig& config, const MaasTarget& target,
                         MetricsRegistry* registry)
    : config_(config),
      target_(target),
      registry_(registry),
      maas_(std::make_unique<InstrumentedMaas>(target.make_client(), registry,
                                               kCoordinatorActor)),
      mem_backend_(target.is_mem()) {}

void Coordinator::init_job() {
  config_.validate();
  // Name lookup only; the coordinator never touches algorithm logic.
  lookup_algorithm(config_.algorithm);

  auto manifest_json = maas_->get_string(keys::manifest());
  if (!manifest_json)
    throw SetupError("partition manifest not found; upload partitions first");
  PartitionManifest manifest = PartitionManifest::from_json(*manifest_json);
  if (manifest.num_partitions != config_.partitions)
    throw SetupError("manifest has " + std::to_string(manifest.num_partitions) +
                     " partitions, job wants " + std::to_string(config_.partitions));

  sweep_previous_run(manifest);

  maas_->put_string(keys::ctl_job(), config_.to_json());
  maas_->put_counter(keys::ctl_unfinished(0), config_.partitions);
  maas_->clear_flag(keys::ctl_keep_computing());
  maas_->clear_flag(keys::ctl_finish());
  maas_->clear_flag(keys::ctl_terminate());
  for (std::uint32_t w = 0; w < config_.workers_launched(); ++w)
    maas_->del(keys::ctl_error(static_cast<int>(w)));
  if (config_.mode() == ExecutionMode::Rotating) maas_->put_counter(keys::ctl_claim(0), 0);
  // The superstep counter goes last; it is what workers poll for.
  maas_->put_counter(keys::ctl_superstep(), 0);
  superstep_ = 0;
  maas_->set_epoch(0);
}

void Coordinator::invoke_workers(WorkerLauncher& launcher) {
  try {
    for (std::uint32_t w = 0; w < config_.workers_launched(); ++w)
      launcher.launch(config_, target_, registry_, w);
  } catch (const std::exception& ex) {
    maas_->set_flag(keys::ctl_finish());
    throw JobError(std::string("worker launch failed: ") + ex.what(), superstep_);
  }
}

void Coordinator::sweep_previous_run(const PartitionManifest& manifest) {
  // Partition uploads are long-lived and jobs reuse stores, but message,
  // result, and aggregate keys are superstep-scoped and would leak into a
  // new run (an empty outbox skips its block write, so a reader could pick
  // up the previous run's block at the same key; rotating preload reads
  // partial results speculatively). The previous run's extent is bounded by
  // its control state, so its keys can be removed precisely.
  auto prev_superstep = maas_->read_counter(keys::ctl_superstep());
  if (!prev_superstep) return;

  std::uint32_t prev_workers = config_.workers_launched();
  std::uint32_t prev_partitions = config_.partitions;
  bool prev_per_vertex = false;
  if (auto prev_job = maas_->get_string(keys::ctl_job())) {
    try {
      JobConfig prev = JobConfig::from_json(*prev_job);
      prev_workers = prev.workers_launched();
      prev_partitions = prev.partitions;
      prev_per_vertex = !prev.key_aggregation;
    } catch (const SetupError&) {
      // Unparsable old config; fall back to the current dimensions.
    }
  }

  // A straggler of the old run may have written one superstep past the
  // final counter value it observed.
  for (std::int64_t s = 0; s <= *prev_superstep + 1; ++s) {
    for (std::uint32_t src = 0; src < prev_workers; ++src)
      for (std::uint32_t dst = 0; dst < prev_workers; ++dst)
        if (src != dst) maas_->del(keys::msg_block(s, src, dst));
    for (std::uint32_t pid = 0; pid < prev_partitions; ++pid)
      maas_->del(keys::result(s, pid));
    for (std::uint32_t w = 0; w < prev_workers; ++w) maas_->del(keys::ctl_agg(s, w));
    maas_->del(keys::ctl_unfinished(s));
    maas_->del(keys::ctl_claim(s));
    if (prev_per_vertex)
      for (vid_t g = 0; g < manifest.vertex_count; ++g) maas_->del(keys::msg_vertex(s, g));
  }
  for (std::uint32_t pid = 0; pid < prev_partitions; ++pid)
    maas_->del(keys::result_final(pid));
}

Coordinator::BarrierSummary Coordinator::barrier_wait() {
  auto deadline = Clock::now() + config_.barrier_timeout;
  auto poll = config_.effective_poll(mem_backend_);
  while (true) {
    auto unfinished = maas_->read_counter(keys::ctl_unfinished(superstep_));
    if (unfinished && *unfinished == 0) {
      if (auto* reg = maas_->registry())
        reg->record_event(kCoordinatorActor, superstep_, EventKind::BarrierReturn, superstep_);
      BarrierSummary s;
      s.superstep = superstep_;
      s.keep_computing = maas_->flag_set(keys::ctl_keep_computing());
      s.terminate = maas_->flag_set(keys::ctl_terminate());
      return s;
    }
    for (std::uint32_t w = 0; w < config_.workers_launched(); ++w) {
      auto err = maas_->get_string(keys::ctl_error(static_cast<int>(w)));
      if (err) {
        abort_job("worker " + std::to_string(w) + " failed: " + *err);
      }
    }
    if (Clock::now() >= deadline) abort_job("barrier timeout");
    maas_->wait_hint(poll);
  }
}

void Coordinator::abort_job(const std::string& reason) {
  maas_->set_flag(keys::ctl_finish());
  throw JobError(reason, superstep_);
}

Coordinator::Advance Coordinator::advance_or_finish(const BarrierSummary& summary) {
  if (!summary.keep_computing || summary.terminate) {
    maas_->set_flag(keys::ctl_finish());
    return Advance::Done;
  }
  if (superstep_ + 1 >= config_.max_supersteps) {
    // Safety net; the result records the cap.
    maas_->set_flag(keys::ctl_finish());
    return Advance::Done;
  }
  maas_->clear_flag(keys::ctl_keep_computing());
  maas_->put_counter(keys::ctl_unfinished(superstep_ + 1), config_.partitions);
  if (config_.mode() == ExecutionMode::Rotating)
    maas_->put_counter(keys::ctl_claim(superstep_ + 1), 0);
  // The rollover event must be logged before the bump becomes visible, or a
  // fast worker's first read of the new superstep could be sequenced ahead
  // of it; the counter bump itself releases the workers, so it goes last.
  if (auto* reg = maas_->registry())
    reg->record_event(kCoordinatorActor, superstep_ + 1, EventKind::Rollover, superstep_ + 1);
  std::int64_t next = maas_->atomic_add(keys::ctl_superstep(), 1);
  superstep_ = next;
  maas_->set_epoch(next);
  return Advance::Continue;
}

// ---------------------------------------------------------------------------

namespace {

JobResult gather_results(const JobConfig& config, MaasClient& maas, std::int64_t supersteps) {
  const AlgorithmInfo& info = lookup_algorithm(config.algorithm);
  auto manifest_json = maas.get_string(keys::manifest());
  if (!manifest_json) throw SetupError("partition manifest disappeared");
  PartitionManifest manifest = PartitionManifest::from_json(*manifest_json);

  JobResult result;
  result.value_width = info.value_width;
  result.float_valued = info.float_valued;
  result.supersteps = supersteps;
  result.values.assign(manifest.vertex_count, info.initial_value);

  const bool rotating = config.mode() == ExecutionMode::Rotating;
  for (const auto& entry : manifest.partitions) {
    std::optional<Bytes> raw = rotating ? maas.get(keys::result(supersteps, entry.pid))
                                        : maas.get(keys::result_final(entry.pid));
    if (!raw) throw JobError("missing results for partition " + std::to_string(entry.pid),
                             supersteps);
    std::size_t off = 0;
    std::vector<std::uint64_t> values = decode_value_array(*raw, off, info.value_width);
    if (values.size() < entry.inner_count)
      throw JobError("result array too small for partition " + std::to_string(entry.pid),
                     supersteps);
    for (std::uint64_t l = 0; l < entry.inner_count; ++l)
      result.values[entry.inner_base + l] = values[l];
  }
  return result;
}

}  // namespace

JobResult run_job(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry,
                  WorkerLauncher& launcher) {
  config.validate();
  std::unique_ptr<MetricsRegistry> local_registry;
  if (!registry) {
    local_registry = std::make_unique<MetricsRegistry>(false);
    registry = local_registry.get();
  }

  Coordinator coordinator(config, target, registry);
  coordinator.init_job();

  auto t0 = Clock::now();
  coordinator.invoke_workers(launcher);

  bool capped = false;
  try {
    while (true) {
      auto step_t0 = Clock::now();
      auto summary = coordinator.barrier_wait();
      registry->record_superstep_wall(summary.superstep,
                                      std::chrono::duration<double>(Clock::now() - step_t0)
                                          .count());
      if (summary.keep_computing && !summary.terminate &&
          coordinator.superstep() + 1 >= config.max_supersteps)
        capped = true;
      if (coordinator.advance_or_finish(summary) == Coordinator::Advance::Done) break;
    }
  } catch (...) {
    // Whatever failed, raise finish so workers stop polling, then drain them.
    try {
      target.make_client()->set_flag(keys::ctl_finish());
      launcher.join_all();
    } catch (...) {
    }
    throw;
  }

  launcher.join_all();
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  auto client = target.make_client();
  JobResult result = gather_results(config, *client, coordinator.superstep());
  result.capped = capped;
  result.report =
      collect(*registry, coordinator.superstep(), wall, config.memory_gb,
              config.workers_launched());
  return result;
}

JobResult run_job(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry) {
  auto launcher = make_thread_launcher();
  return run_job(config, target, registry, *launcher);
}

}  // namespace weft

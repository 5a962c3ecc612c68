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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "weft/maas.hpp"

namespace weft {

inline constexpr int kCoordinatorActor = -1;

enum class EventKind : std::uint8_t {
  Put,
  Get,
  Exists,
  Del,
  AtomicAdd,
  SetFlag,
  FlagSet,
  ClearFlag,
  Claim,
  Preload,
  Rollover,        // coordinator advanced ctl/superstep to arg
  BarrierReturn,   // coordinator observed unfinished == 0 for epoch
  Decrement,       // worker's barrier contribution; arg = partitions completed
  Computed,        // arg = vertices iterated this superstep by this actor
};

struct Event {
  std::uint64_t seq = 0;
  int actor = 0;
  std::int64_t epoch = 0;
  EventKind kind = EventKind::Get;
  std::string key;
  std::int64_t arg = 0;
  bool found = false;
  std::uint64_t bytes = 0;
};

struct OpStats {
  std::uint64_t count = 0;
  std::uint64_t bytes = 0;
};

struct WorkerSpan {
  int actor = 0;
  double lifetime_seconds = 0;
  double busy_seconds = 0;
  std::uint32_t threads = 1;
};

// Shared, thread-safe sink for storage-op counts and protocol events.
// Observation only: nothing in the engine reads it back during a run.
class MetricsRegistry {
 public:
  explicit MetricsRegistry(bool keep_events = true) : keep_events_(keep_events) {}

  void record_op(int actor, std::int64_t epoch, EventKind kind, std::string_view key,
                 std::uint64_t bytes, bool found, std::int64_t arg = 0);
  void record_event(int actor, std::int64_t epoch, EventKind kind, std::int64_t arg);
  void record_span(WorkerSpan span);
  void record_superstep_wall(std::int64_t superstep, double seconds);
  void record_value_slots(int actor, std::uint64_t slots);
  void record_staged_entries(int actor, std::int64_t epoch, std::uint64_t n);

  // Count of storage ops by a given actor in a given superstep and namespace.
  std::uint64_t ops(int actor, std::int64_t epoch, keys::Namespace ns) const;
  std::uint64_t ops_in_namespace(keys::Namespace ns) const;
  std::uint64_t msg_bytes_out(int actor) const;
  std::uint64_t msg_bytes_in(int actor) const;
  std::uint64_t computed(std::int64_t epoch) const;
  std::uint64_t staged_entries_total() const;
  std::uint64_t staged_entries(int actor) const;
  std::uint64_t value_slots_total() const;

  std::vector<Event> events() const;
  std::vector<WorkerSpan> spans() const;
  std::map<std::int64_t, double> superstep_walls() const;

  // Maximum over (worker, superstep) of message-namespace ops, workers only.
  std::uint64_t max_msg_ops_per_worker_superstep() const;

  void reset();

 private:
  struct CountKey {
    int actor;
    std::int64_t epoch;
    keys::Namespace ns;
    auto operator<=>(const CountKey&) const = default;
  };

  mutable std::mutex mu_;
  bool keep_events_;
  std::atomic<std::uint64_t> seq_{0};
  std::vector<Event> events_;
  std::map<CountKey, OpStats> counts_;
  std::map<int, OpStats> msg_out_, msg_in_;
  std::map<std::int64_t, std::uint64_t> computed_;
  std::vector<WorkerSpan> spans_;
  std::map<std::int64_t, double> superstep_wall_;
  std::map<int, std::uint64_t> value_slots_;
  std::map<int, std::uint64_t> staged_by_actor_;
  std::uint64_t staged_entries_ = 0;
};

// Storage client wrapper that attributes every operation to an actor and its
// current superstep epoch. The wrapped client keeps full behavior; with a
// null registry the wrapper is pass-through.
class InstrumentedMaas : public MaasClient {
 public:
  InstrumentedMaas(std::unique_ptr<MaasClient> inner, MetricsRegistry* registry, int actor)
      : inner_(std::move(inner)), registry_(registry), actor_(actor) {}

  void set_epoch(std::int64_t epoch) { epoch_.store(epoch, std::memory_order_relaxed); }
  std::int64_t epoch() const { return epoch_.load(std::memory_order_relaxed); }
  int actor() const { return actor_; }
  MetricsRegistry* registry() const { return registry_; }

  void put(std::string_view key, ByteSpan value) override;
  std::optional<Bytes> get(std::string_view key) override;
  bool exists(std::string_view key) override;
  void del(std::string_view key) override;
  std::int64_t atomic_add(std::string_view key, std::int64_t delta) override;
  void set_flag(std::string_view key) override;
  bool flag_set(std::string_view key) override;
  void clear_flag(std::string_view key) override;
  void wait_hint(std::chrono::microseconds timeout) override;

 private:
  std::unique_ptr<MaasClient> inner_;
  MetricsRegistry* registry_;
  int actor_;
  std::atomic<std::int64_t> epoch_{0};
};

// Post-run cost and traffic accounting.
struct RunReport {
  std::int64_t supersteps = 0;
  double wall_seconds = 0;
  std::map<std::int64_t, double> superstep_wall_seconds;
  std::vector<WorkerSpan> workers;
  double core_seconds = 0;  // sum of worker lifetimes x threads
  double gb_seconds = 0;    // sum of worker lifetimes x configured GB
  std::map<std::string, std::uint64_t> ops_by_namespace;
  std::uint64_t msg_bytes_out = 0;
  std::uint64_t msg_bytes_in = 0;
  std::uint64_t max_msg_ops_per_worker_superstep = 0;
  bool partial = false;  // logs incomplete (e.g. out-of-process workers)
};

RunReport collect(const MetricsRegistry& registry, std::int64_t supersteps, double wall_seconds,
                  double memory_gb_per_worker, std::uint32_t expected_workers);

// BSP epoch-safety check over the event log: every read of a superstep-k
// message must happen after the k -> k+1 rollover, and the corresponding
// write before it. Returns the number of violating reads.
std::size_t bsp_epoch_violations(const std::vector<Event>& events);

}  // namespace weft

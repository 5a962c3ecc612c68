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

#include "weft/metrics.hpp"

#include <algorithm>

namespace weft {

void MetricsRegistry::record_op(int actor, std::int64_t epoch, EventKind kind,
                                std::string_view key, std::uint64_t bytes, bool found,
                                std::int64_t arg) {
  std::uint64_t seq = seq_.fetch_add(1, std::memory_order_relaxed);
  auto ns = keys::namespace_of(key);
  std::lock_guard lock(mu_);
  auto& c = counts_[{actor, epoch, ns}];
  c.count += 1;
  c.bytes += bytes;
  if (ns == keys::Namespace::Msg && actor != kCoordinatorActor) {
    if (kind == EventKind::Put) {
      msg_out_[actor].count += 1;
      msg_out_[actor].bytes += bytes;
    } else if (kind == EventKind::Get) {
      msg_in_[actor].count += 1;
      msg_in_[actor].bytes += bytes;
    }
  }
  if (keep_events_) {
    Event e;
    e.seq = seq;
    e.actor = actor;
    e.epoch = epoch;
    e.kind = kind;
    e.key = std::string(key);
    e.arg = arg;
    e.found = found;
    e.bytes = bytes;
    events_.push_back(std::move(e));
  }
}

void MetricsRegistry::record_event(int actor, std::int64_t epoch, EventKind kind,
                                   std::int64_t arg) {
  std::uint64_t seq = seq_.fetch_add(1, std::memory_order_relaxed);
  std::lock_guard lock(mu_);
  if (kind == EventKind::Computed) computed_[epoch] += static_cast<std::uint64_t>(arg);
  if (keep_events_) {
    Event e;
    e.seq = seq;
    e.actor = actor;
    e.epoch = epoch;
    e.kind = kind;
    e.arg = arg;
    events_.push_back(std::move(e));
  }
}

void MetricsRegistry::record_span(WorkerSpan span) {
  std::lock_guard lock(mu_);
  spans_.push_back(span);
}

void MetricsRegistry::record_superstep_wall(std::int64_t superstep, double seconds) {
  std::lock_guard lock(mu_);
  superstep_wall_[superstep] = seconds;
}

void MetricsRegistry::record_value_slots(int actor, std::uint64_t slots) {
  std::lock_guard lock(mu_);
  value_slots_[actor] = slots;
}

void MetricsRegistry::record_staged_entries(int actor, std::int64_t epoch, std::uint64_t n) {
  (void)epoch;
  std::lock_guard lock(mu_);
  staged_entries_ += n;
  staged_by_actor_[actor] += n;
}

std::uint64_t MetricsRegistry::ops(int actor, std::int64_t epoch, keys::Namespace ns) const {
  std::lock_guard lock(mu_);
  auto it = counts_.find({actor, epoch, ns});
  return it == counts_.end() ? 0 : it->second.count;
}

std::uint64_t MetricsRegistry::ops_in_namespace(keys::Namespace ns) const {
  std::lock_guard lock(mu_);
  std::uint64_t total = 0;
  for (const auto& [k, v] : counts_)
    if (k.ns == ns) total += v.count;
  return total;
}

std::uint64_t MetricsRegistry::msg_bytes_out(int actor) const {
  std::lock_guard lock(mu_);
  auto it = msg_out_.find(actor);
  return it == msg_out_.end() ? 0 : it->second.bytes;
}

std::uint64_t MetricsRegistry::msg_bytes_in(int actor) const {
  std::lock_guard lock(mu_);
  auto it = msg_in_.find(actor);
  return it == msg_in_.end() ? 0 : it->second.bytes;
}

std::uint64_t MetricsRegistry::computed(std::int64_t epoch) const {
  std::lock_guard lock(mu_);
  auto it = computed_.find(epoch);
  return it == computed_.end() ? 0 : it->second;
}

std::uint64_t MetricsRegistry::staged_entries_total() const {
  std::lock_guard lock(mu_);
  return staged_entries_;
}

std::uint64_t MetricsRegistry::staged_entries(int actor) const {
  std::lock_guard lock(mu_);
  auto it = staged_by_actor_.find(actor);
  return it == staged_by_actor_.end() ? 0 : it->second;
}

std::uint64_t MetricsRegistry::value_slots_total() const {
  std::lock_guard lock(mu_);
  std::uint64_t total = 0;
  for (const auto& [_, n] : value_slots_) total += n;
  return total;
}

std::vector<Event> MetricsRegistry::events() const {
  std::lock_guard lock(mu_);
  auto copy = events_;
  std::sort(copy.begin(), copy.end(), [](const Event& a, const Event& b) { return a.seq < b.seq; });
  return copy;
}

std::vector<WorkerSpan> MetricsRegistry::spans() const {
  std::lock_guard lock(mu_);
  return spans_;
}

std::map<std::int64_t, double> MetricsRegistry::superstep_walls() const {
  std::lock_guard lock(mu_);
  return superstep_wall_;
}

std::uint64_t MetricsRegistry::max_msg_ops_per_worker_superstep() const {
  std::lock_guard lock(mu_);
  std::uint64_t best = 0;
  for (const auto& [k, v] : counts_)
    if (k.ns == keys::Namespace::Msg && k.actor != kCoordinatorActor)
      best = std::max(best, v.count);
  return best;
}

void MetricsRegistry::reset() {
  std::lock_guard lock(mu_);
  events_.clear();
  counts_.clear();
  msg_out_.clear();
  msg_in_.clear();
  computed_.clear();
  spans_.clear();
  superstep_wall_.clear();
  value_slots_.clear();
  staged_by_actor_.clear();
  staged_entries_ = 0;
  seq_.store(0);
}

// ---------------------------------------------------------------------------

void InstrumentedMaas::put(std::string_view key, ByteSpan value) {
  inner_->put(key, value);
  if (registry_)
    registry_->record_op(actor_, epoch(), EventKind::Put, key, value.size(), true);
}

std::optional<Bytes> InstrumentedMaas::get(std::string_view key) {
  auto r = inner_->get(key);
  if (registry_)
    registry_->record_op(actor_, epoch(), EventKind::Get, key, r ? r->size() : 0,
                         r.has_value());
  return r;
}

bool InstrumentedMaas::exists(std::string_view key) {
  bool r = inner_->exists(key);
  if (registry_) registry_->record_op(actor_, epoch(), EventKind::Exists, key, 0, r);
  return r;
}

void InstrumentedMaas::del(std::string_view key) {
  inner_->del(key);
  if (registry_) registry_->record_op(actor_, epoch(), EventKind::Del, key, 0, true);
}

std::int64_t InstrumentedMaas::atomic_add(std::string_view key, std::int64_t delta) {
  std::int64_t r = inner_->atomic_add(key, delta);
  if (registry_)
    registry_->record_op(actor_, epoch(), EventKind::AtomicAdd, key, 0, true, r);
  return r;
}

void InstrumentedMaas::set_flag(std::string_view key) {
  inner_->set_flag(key);
  if (registry_) registry_->record_op(actor_, epoch(), EventKind::SetFlag, key, 0, true);
}

bool InstrumentedMaas::flag_set(std::string_view key) {
  bool r = inner_->flag_set(key);
  if (registry_) registry_->record_op(actor_, epoch(), EventKind::FlagSet, key, 0, r);
  return r;
}

void InstrumentedMaas::clear_flag(std::string_view key) {
  inner_->clear_flag(key);
  if (registry_) registry_->record_op(actor_, epoch(), EventKind::ClearFlag, key, 0, true);
}

void InstrumentedMaas::wait_hint(std::chrono::microseconds timeout) {
  inner_->wait_hint(timeout);
}

// ---------------------------------------------------------------------------

RunReport collect(const MetricsRegistry& registry, std::int64_t supersteps, double wall_seconds,
                  double memory_gb_per_worker, std::uint32_t expected_workers) {
  RunReport rep;
  rep.supersteps = supersteps;
  rep.wall_seconds = wall_seconds;
  rep.superstep_wall_seconds = registry.superstep_walls();
  rep.workers = registry.spans();
  for (const auto& s : rep.workers) {
    rep.core_seconds += s.lifetime_seconds * s.threads;
    rep.gb_seconds += s.lifetime_seconds * memory_gb_per_worker;
    rep.msg_bytes_out += registry.msg_bytes_out(s.actor);
    rep.msg_bytes_in += registry.msg_bytes_in(s.actor);
  }
  for (auto ns : {keys::Namespace::Part, keys::Namespace::Msg, keys::Namespace::Result,
                  keys::Namespace::Ctl})
    rep.ops_by_namespace[keys::namespace_name(ns)] = registry.ops_in_namespace(ns);
  rep.max_msg_ops_per_worker_superstep = registry.max_msg_ops_per_worker_superstep();
  rep.partial = rep.workers.size() != expected_workers;
  return rep;
}

std::size_t bsp_epoch_violations(const std::vector<Event>& events) {
  // rollover_seq[s] = seq of the coordinator event advancing the counter to
  // s; barrier_seq[s] = seq of the barrier completing superstep s.
  std::map<std::int64_t, std::uint64_t> rollover_seq, barrier_seq;
  for (const auto& e : events) {
    if (e.kind == EventKind::Rollover) rollover_seq[e.arg] = e.seq;
    if (e.kind == EventKind::BarrierReturn) barrier_seq[e.arg] = e.seq;
  }

  std::size_t violations = 0;
  for (const auto& e : events) {
    auto s = keys::msg_superstep(e.key);
    if (!s) continue;
    auto roll = rollover_seq.find(*s + 1);
    if (e.kind == EventKind::Put) {
      // A superstep-s message must exist before the coordinator can observe
      // unfinished == 0, and certainly before the s -> s+1 rollover.
      auto barrier = barrier_seq.find(*s);
      if (barrier != barrier_seq.end() && e.seq > barrier->second) ++violations;
      if (roll != rollover_seq.end() && e.seq > roll->second) ++violations;
    } else if (e.kind == EventKind::Get && e.actor != kCoordinatorActor) {
      // A superstep-s message read before the rollover leaks across the epoch.
      if (roll == rollover_seq.end() || e.seq < roll->second) ++violations;
    }
  }
  return violations;
}

}  // namespace weft

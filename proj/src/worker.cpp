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

#include "weft/worker.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "weft/codec.hpp"

namespace weft {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct LoadedPartition {
  Partition part;
  std::vector<std::uint32_t> slot_index;  // local slot -> storage index
  // consumers[slot] = inner rows whose adjacency references the slot; drives
  // activation marks when a slot's value changes.
  std::vector<std::vector<lvid_t>> consumers;
  std::vector<lvid_t> full_range;
  std::vector<bool> active_pending;  // inner slots to iterate next superstep
  std::vector<std::uint64_t> storage;  // rotating mode only; pinned shares

  void build_indexes(bool activation) {
    full_range.resize(part.inner_count());
    std::iota(full_range.begin(), full_range.end(), 0);
    if (activation) {
      active_pending.assign(part.inner_count(), false);
      consumers.assign(part.local_count(), {});
      for (lvid_t u = 0; u < part.inner_count(); ++u)
        for (lvid_t w : part.neighbors(u)) consumers[w].push_back(u);
    }
  }

  void mark_consumers(lvid_t slot) {
    for (lvid_t u : consumers[slot]) active_pending[u] = true;
  }
};

// Collects one partition's superstep output; merged in pid order afterwards.
struct PartitionSink : StepSink {
  LoadedPartition* lp = nullptr;
  bool activation = false;
  std::vector<std::pair<vid_t, std::uint64_t>> changes;
  double global_sum = 0.0;
  bool terminated = false;
  // Indices into `changes` pair with the inner slot for bitmap lookups.
  std::vector<lvid_t> changed_slots;

  void on_change(lvid_t inner, std::uint64_t new_value) override {
    changes.emplace_back(lp->part.global_of_local(inner), new_value);
    changed_slots.push_back(inner);
    if (activation) lp->mark_consumers(inner);
  }
  void add_global_sum(double x) override { global_sum += x; }
  void signal_terminate() override { terminated = true; }
};

class WorkerTask {
 public:
  WorkerTask(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry,
             std::uint32_t worker_id)
      : config_(config),
        info_(lookup_algorithm(config.algorithm)),
        codec_(find_codec(config.compression)),
        registry_(registry),
        me_(worker_id),
        workers_(config.workers_launched()),
        rotating_(config.mode() == ExecutionMode::Rotating),
        maas_(target.make_client(), registry, static_cast<int>(worker_id)),
        poll_(config.effective_poll(target.is_mem())) {
    auto manifest_json = maas_.get_string(keys::manifest());
    if (!manifest_json) throw SetupError("partition manifest not found");
    manifest_ = PartitionManifest::from_json(*manifest_json);
    GraphMeta meta{manifest_.vertex_count, manifest_.directed, manifest_.weighted};
    algorithm_ = info_.factory(config.params, meta);
    activation_ = config.activation_start.has_value();
    activation_from_ = activation_ ? std::max<std::int64_t>(1, *config.activation_start)
                                   : std::numeric_limits<std::int64_t>::max();
    if (!rotating_) {
      worker_bits_.assign(workers_, Bitmap(config.partitions));
      for (std::uint32_t pid = 0; pid < config.partitions; ++pid)
        worker_bits_[config.owner_worker(pid)].set(pid);
    }
    bases_.reserve(manifest_.partitions.size());
    for (const auto& e : manifest_.partitions) bases_.push_back(e.inner_base);
  }

  void run() {
    auto born = Clock::now();
    double busy = 0.0;
    std::int64_t last_done = -1;
    while (true) {
      if (maas_.flag_set(keys::ctl_finish())) {
        finish_exit();
        break;
      }
      auto s = maas_.read_counter(keys::ctl_superstep());
      if (!s) throw StorageError("superstep counter missing");
      if (*s == last_done) {
        maas_.wait_hint(poll_);
        continue;
      }
      // Pinned workers move in lockstep: the barrier cannot pass without
      // their partitions. A rotating worker can wake to find whole
      // supersteps already claimed and completed by its peers; it joins the
      // current one, with partition state coming from the result namespace.
      if (!rotating_ && *s != last_done + 1)
        throw JobError("superstep counter skipped from " + std::to_string(last_done), *s);
      maas_.set_epoch(*s);
      auto t0 = Clock::now();
      run_superstep(*s);
      busy += seconds_since(t0);
      last_done = *s;
      maas_.set_epoch(*s + 1);
    }
    if (registry_) {
      WorkerSpan span;
      span.actor = static_cast<int>(me_);
      span.lifetime_seconds = seconds_since(born);
      span.busy_seconds = busy;
      span.threads = config_.threads;
      registry_->record_span(span);
    }
  }

 private:
  // ---- shared helpers ----

  std::uint32_t pid_of_global(vid_t g) const {
    auto it = std::upper_bound(bases_.begin(), bases_.end(), g);
    return static_cast<std::uint32_t>(it - bases_.begin()) - 1;
  }

  Partition load_blob(std::uint32_t pid) {
    auto blob = maas_.get(keys::part_blob(pid));
    if (!blob) throw StorageError("partition blob missing: " + keys::part_blob(pid));
    const auto& entry = manifest_.partitions[pid];
    if (fnv1a64(*blob) != entry.checksum)
      throw StorageError("partition blob checksum mismatch for pid " + std::to_string(pid));
    return deserialize_partition(*blob, entry.inner_base);
  }

  // Job-wide scalar aggregate, one key per (superstep, worker). Reduction
  // reads every worker's key, own included: a rotating worker can skip a
  // whole superstep, so nothing may depend on in-memory partials. An absent
  // key contributes zero.
  double reduce_global_sum(std::int64_t superstep) {
    if (!info_.uses_global_sum || superstep == 0) {
      return 0.0;
    }
    double total = 0.0;
    for (std::uint32_t j = 0; j < workers_; ++j) {
      auto raw = maas_.get(keys::ctl_agg(superstep - 1, j));
      if (raw) {
        std::size_t off = 0;
        total += get_f64_le(*raw, off);
      }
    }
    return total;
  }

  void write_global_sum(std::int64_t superstep, double sum) {
    if (!info_.uses_global_sum) return;
    if (sum != 0.0) {
      Bytes b;
      put_f64_le(b, sum);
      maas_.put(keys::ctl_agg(superstep, me_), b);
    }
  }

  std::vector<lvid_t> activation_filter(LoadedPartition& lp, std::int64_t superstep,
                                    const std::vector<bool>& extra_marks) {
    if (!activation_ || superstep < activation_from_) {
      if (activation_)
        std::fill(lp.active_pending.begin(), lp.active_pending.end(), false);
      return lp.full_range;
    }
    std::vector<lvid_t> set;
    for (lvid_t l = 0; l < lp.part.inner_count(); ++l)
      if (lp.active_pending[l] || (!extra_marks.empty() && extra_marks[l])) set.push_back(l);
    std::fill(lp.active_pending.begin(), lp.active_pending.end(), false);
    return set;
  }

  struct StepOutput {
    std::vector<std::pair<vid_t, std::uint64_t>> changes;  // global id, value
    std::vector<std::pair<std::size_t, lvid_t>> change_src;  // (partition idx, inner slot)
    bool any_change = false;
    double global_sum = 0.0;
    bool terminated = false;
    std::uint64_t iterated = 0;
  };

  // Runs PEval/IncVal on a batch of partitions, one thread per partition,
  // merging per-thread sinks in batch order.
  void compute_batch(std::vector<LoadedPartition*> batch,
                     const std::vector<std::vector<lvid_t>>& ranges,
                     const std::vector<std::size_t>& part_indices, std::uint64_t* storage_base,
                     const std::vector<std::uint64_t*>& storages, std::int64_t superstep,
                     double global_sum_prev, StepOutput& out) {
    std::vector<PartitionSink> sinks(batch.size());
    auto body = [&](std::size_t i) {
      LoadedPartition& lp = *batch[i];
      sinks[i].lp = &lp;
      sinks[i].activation = activation_;
      std::uint64_t* storage = storage_base ? storage_base : storages[i];
      StepContext ctx(lp.part, storage, lp.slot_index.data(), ranges[i], superstep,
                      manifest_.vertex_count, global_sum_prev, sinks[i]);
      if (superstep == 0)
        algorithm_->peval(ctx);
      else
        algorithm_->incval(ctx);
    };
    if (batch.size() == 1) {
      body(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) threads.emplace_back(body, i);
      for (auto& t : threads) t.join();
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (std::size_t k = 0; k < sinks[i].changes.size(); ++k) {
        out.changes.push_back(sinks[i].changes[k]);
        out.change_src.emplace_back(part_indices[i], sinks[i].changed_slots[k]);
      }
      out.any_change |= !sinks[i].changes.empty();
      out.global_sum += sinks[i].global_sum;
      out.terminated |= sinks[i].terminated;
      out.iterated += ranges[i].size();
    }
  }

  void flush_block(std::int64_t superstep, std::uint32_t dst,
                   std::vector<std::pair<vid_t, std::uint64_t>> entries) {
    if (entries.empty()) return;
    // A vertex may be staged more than once within a superstep (PEval
    // initialization followed by a sweep update); the last staged value is
    // the committed one.
    std::map<vid_t, std::uint64_t> last;
    for (const auto& [g, v] : entries) last[g] = v;
    entries.assign(last.begin(), last.end());
    MessageBlock block;
    block.src_worker = me_;
    block.dst_worker = dst;
    block.superstep = superstep;
    block.value_width = info_.value_width;
    block.entries = std::move(entries);
    Bytes encoded = encode_message_block(block);
    Bytes framed = codec_.compress(encoded);
    maas_.put(keys::msg_block(superstep, me_, dst), framed);
  }

  std::optional<MessageBlock> fetch_block(std::int64_t superstep, std::uint32_t src) {
    auto raw = maas_.get(keys::msg_block(superstep, src, me_));
    if (!raw) return std::nullopt;
    Bytes decoded = codec_.decompress(*raw);
    return decode_message_block(decoded, info_.value_width);
  }

  Bytes pack_value(std::uint64_t v) const {
    Bytes b;
    for (int i = 0; i < info_.value_width; ++i)
      b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return b;
  }

  std::uint64_t unpack_value(ByteSpan b) const {
    if (b.size() != info_.value_width) throw CodecError("per-vertex value has wrong width");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < b.size(); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  void finalize_superstep(std::int64_t superstep, const StepOutput& out,
                       std::uint32_t partitions_done) {
    write_global_sum(superstep, out.global_sum);
    if (out.terminated) maas_.set_flag(keys::ctl_terminate());
    if (out.any_change && !out.terminated) maas_.set_flag(keys::ctl_keep_computing());
    if (registry_) {
      registry_->record_event(static_cast<int>(me_), superstep, EventKind::Computed,
                              static_cast<std::int64_t>(out.iterated));
    }
    std::int64_t left = maas_.atomic_add(keys::ctl_unfinished(superstep), -static_cast<std::int64_t>(partitions_done));
    if (left < 0) throw JobError("unfinished counter went negative", superstep);
    if (registry_)
      registry_->record_event(static_cast<int>(me_), superstep, EventKind::Decrement,
                              partitions_done);
  }

  void run_superstep(std::int64_t superstep) {
    if (rotating_)
      run_rotating_superstep(superstep);
    else
      run_pinned_superstep(superstep);
  }

  // ---- pinned mode ----

  void ensure_loaded_pinned() {
    if (!owned_.empty() || pinned_loaded_) return;
    pinned_loaded_ = true;
    for (std::uint32_t pid = 0; pid < config_.partitions; ++pid)
      if (config_.owner_worker(pid) == me_) {
        LoadedPartition lp;
        lp.part = load_blob(pid);
        lp.build_indexes(activation_);
        owned_.push_back(std::move(lp));
      }

    // Unified worker memory: inner slots partition-major, then one shared
    // slot per distinct mirrored vertex. A vertex mirrored by several
    // co-located partitions, or owned here and mirrored by a co-located
    // peer, occupies exactly one mirror slot.
    std::uint32_t next = 0;
    for (auto& lp : owned_) {
      lp.slot_index.resize(lp.part.local_count());
      for (lvid_t l = 0; l < lp.part.inner_count(); ++l) lp.slot_index[l] = next++;
    }
    for (std::size_t i = 0; i < owned_.size(); ++i) {
      auto& lp = owned_[i];
      for (lvid_t o = 0; o < lp.part.outer_count(); ++o) {
        vid_t g = lp.part.outer_globals[o];
        auto [it, inserted] = mirror_slot_.try_emplace(g, next);
        if (inserted) ++next;
        lp.slot_index[lp.part.inner_count() + o] = it->second;
        mirror_holders_[g].emplace_back(i, lp.part.inner_count() + o);
      }
    }
    storage_.assign(next, info_.initial_value);
    if (registry_) registry_->record_value_slots(static_cast<int>(me_), storage_.size());
  }

  void apply_mirror(vid_t g, std::uint64_t value) {
    auto it = mirror_slot_.find(g);
    if (it == mirror_slot_.end()) return;
    storage_[it->second] = value;
    if (activation_)
      for (auto [pi, slot] : mirror_holders_[g]) owned_[pi].mark_consumers(slot);
  }

  void apply_incoming(std::int64_t superstep) {
    if (superstep == 0) return;
    if (config_.key_aggregation) {
      for (std::uint32_t j = 0; j < workers_; ++j) {
        if (j == me_) continue;
        auto block = fetch_block(superstep - 1, j);
        if (!block) continue;
        for (const auto& [g, v] : block->entries) apply_mirror(g, v);
      }
    } else {
      // Per-vertex baseline: poll one key per remote mirror.
      for (const auto& [g, _] : mirror_slot_) {
        if (config_.owner_worker(pid_of_global(g)) == me_) continue;
        auto raw = maas_.get(keys::msg_vertex(superstep - 1, g));
        if (raw) apply_mirror(g, unpack_value(*raw));
      }
    }
    // Mirrors of locally owned vertices refresh from last superstep's
    // committed changes without touching storage.
    for (const auto& [g, v] : changed_prev_) apply_mirror(g, v);
    changed_prev_.clear();
  }

  void run_pinned_superstep(std::int64_t superstep) {
    ensure_loaded_pinned();
    double gsum_prev = reduce_global_sum(superstep);
    apply_incoming(superstep);

    StepOutput out;
    std::vector<std::vector<lvid_t>> all_ranges(owned_.size());
    for (std::size_t i = 0; i < owned_.size(); ++i)
      all_ranges[i] = activation_filter(owned_[i], superstep, {});

    for (std::size_t start = 0; start < owned_.size(); start += config_.threads) {
      std::size_t end = std::min(owned_.size(), start + config_.threads);
      std::vector<LoadedPartition*> batch;
      std::vector<std::vector<lvid_t>> ranges;
      std::vector<std::size_t> indices;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&owned_[i]);
        ranges.push_back(all_ranges[i]);
        indices.push_back(i);
      }
      compute_batch(batch, ranges, indices, storage_.data(), {}, superstep, gsum_prev, out);
    }

    // Stage and flush the outbox, one block per destination worker.
    std::uint64_t staged = 0;
    std::vector<std::vector<std::pair<vid_t, std::uint64_t>>> outbox(workers_);
    for (std::size_t k = 0; k < out.changes.size(); ++k) {
      auto [pi, slot] = out.change_src[k];
      const Bitmap& bm = owned_[pi].part.adj_partitions[slot];
      if (bm.none()) continue;
      if (config_.key_aggregation) {
        if (config_.colocation_dedup) {
          for (std::uint32_t w = 0; w < workers_; ++w) {
            if (w == me_) continue;
            Bitmap inter = masked_intersection(bm, worker_bits_[w]);
            if (inter.any()) {
              outbox[w].push_back(out.changes[k]);
              ++staged;
            }
          }
        } else {
          bm.for_each_set([&](std::size_t pid) {
            std::uint32_t w = config_.owner_worker(static_cast<std::uint32_t>(pid));
            if (w == me_) return;
            outbox[w].push_back(out.changes[k]);
            ++staged;
          });
        }
      } else {
        bool remote = false;
        bm.for_each_set([&](std::size_t pid) {
          if (config_.owner_worker(static_cast<std::uint32_t>(pid)) != me_) remote = true;
        });
        if (remote) {
          maas_.put(keys::msg_vertex(superstep, out.changes[k].first),
                    pack_value(out.changes[k].second));
          ++staged;
        }
      }
    }
    if (config_.key_aggregation)
      for (std::uint32_t w = 0; w < workers_; ++w)
        if (w != me_) flush_block(superstep, w, std::move(outbox[w]));
    if (registry_) registry_->record_staged_entries(static_cast<int>(me_), superstep, staged);

    changed_prev_ = out.changes;
    finalize_superstep(superstep, out, static_cast<std::uint32_t>(owned_.size()));
  }

  void finish_exit() {
    if (rotating_ || owned_.empty()) return;
    for (const auto& lp : owned_) {
      std::vector<std::uint64_t> inner(lp.part.inner_count());
      for (lvid_t l = 0; l < lp.part.inner_count(); ++l) inner[l] = storage_[lp.slot_index[l]];
      maas_.put(keys::result_final(lp.part.pid), encode_value_array(inner, info_.value_width));
    }
  }

  // ---- rotating mode ----

  struct RotatingResult {
    std::vector<std::uint64_t> values;
    std::vector<lvid_t> active;
  };

  Bytes encode_rotating_result(std::span<const std::uint64_t> values,
                               const std::vector<bool>& active) const {
    Bytes out = encode_value_array(values, info_.value_width);
    std::vector<std::uint64_t> slots;
    for (std::size_t l = 0; l < active.size(); ++l)
      if (active[l]) slots.push_back(l);
    varint_encode(slots.size(), out);
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      varint_encode(i == 0 ? slots[0] : slots[i] - prev, out);
      prev = slots[i];
    }
    return out;
  }

  RotatingResult decode_rotating_result(ByteSpan in) const {
    RotatingResult r;
    std::size_t off = 0;
    r.values = decode_value_array(in, off, info_.value_width);
    std::uint64_t count = varint_decode(in, off);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t d = varint_decode(in, off);
      prev = (i == 0) ? d : prev + d;
      r.active.push_back(static_cast<lvid_t>(prev));
    }
    return r;
  }

  void run_rotating_superstep(std::int64_t superstep) {
    double gsum_prev = reduce_global_sum(superstep);

    // Incoming updates for this superstep: one block per other worker plus
    // this worker's own retained updates (the next owner of a partition is
    // unknown at send time, so blocks go to every worker).
    std::unordered_map<vid_t, std::uint64_t> incoming;
    if (superstep >= 1 && config_.key_aggregation) {
      for (std::uint32_t j = 0; j < workers_; ++j) {
        if (j == me_) continue;
        auto block = fetch_block(superstep - 1, j);
        if (!block) continue;
        for (const auto& [g, v] : block->entries) incoming.emplace(g, v);
      }
      // Own staged updates from the immediately preceding superstep, applied
      // in staging order so the last value per vertex wins. After a skipped
      // superstep the set is out of date and everything it covered has
      // already reached the persisted arrays through other workers.
      if (retained_superstep_ == superstep - 1)
        for (const auto& [g, v] : retained_) incoming[g] = v;
    }

    StepOutput out;
    std::uint32_t claimed_count = 0;
    std::vector<std::uint32_t> this_superstep_pids;

    while (true) {
      std::vector<std::uint32_t> batch_pids;
      while (batch_pids.size() < config_.threads) {
        auto pid = claim_next_partition(maas_, superstep, config_.partitions);
        if (!pid) break;
        if (registry_)
          registry_->record_event(static_cast<int>(me_), superstep, EventKind::Claim,
                                  *pid);
        batch_pids.push_back(*pid);
      }
      if (batch_pids.empty()) break;

      std::vector<LoadedPartition> batch(batch_pids.size());
      std::vector<std::vector<lvid_t>> ranges(batch_pids.size());
      std::vector<std::uint64_t*> storages(batch_pids.size());
      for (std::size_t i = 0; i < batch_pids.size(); ++i) {
        std::uint32_t pid = batch_pids[i];
        LoadedPartition& lp = batch[i];
        std::optional<Bytes> preloaded_result;
        if (preload_ && preload_->pid == pid && preload_->for_superstep == superstep) {
          lp.part = std::move(preload_->part);
          preloaded_result = std::move(preload_->result);
          preload_.reset();
        } else {
          lp.part = load_blob(pid);
        }
        lp.build_indexes(activation_);
        lp.slot_index.resize(lp.part.local_count());
        std::iota(lp.slot_index.begin(), lp.slot_index.end(), 0);

        std::vector<bool> incoming_marks;
        if (superstep == 0) {
          lp.storage.assign(lp.part.local_count(), info_.initial_value);
        } else {
          std::optional<Bytes> raw = std::move(preloaded_result);
          if (!raw) raw = maas_.get(keys::result(superstep - 1, pid));
          if (!raw)
            throw JobError("missing partial results for partition " + std::to_string(pid),
                           superstep);
          RotatingResult prev = decode_rotating_result(*raw);
          if (prev.values.size() != lp.part.local_count())
            throw JobError("partial results have wrong size", superstep);
          lp.storage = std::move(prev.values);
          if (activation_) {
            incoming_marks.assign(lp.part.inner_count(), false);
            for (lvid_t l : prev.active)
              if (l < lp.part.inner_count()) incoming_marks[l] = true;
          }
          // Refresh outer mirrors from this superstep's update set.
          if (config_.key_aggregation) {
            for (lvid_t o = 0; o < lp.part.outer_count(); ++o) {
              auto it = incoming.find(lp.part.outer_globals[o]);
              if (it == incoming.end()) continue;
              lp.storage[lp.part.inner_count() + o] = it->second;
              if (activation_)
                for (lvid_t u : lp.consumers[lp.part.inner_count() + o])
                  incoming_marks[u] = true;
            }
          } else {
            for (lvid_t o = 0; o < lp.part.outer_count(); ++o) {
              auto raw_v = maas_.get(keys::msg_vertex(superstep - 1, lp.part.outer_globals[o]));
              if (!raw_v) continue;
              lp.storage[lp.part.inner_count() + o] = unpack_value(*raw_v);
              if (activation_)
                for (lvid_t u : lp.consumers[lp.part.inner_count() + o])
                  incoming_marks[u] = true;
            }
          }
        }
        ranges[i] = activation_filter(lp, superstep, incoming_marks);
        storages[i] = lp.storage.data();
      }

      std::vector<LoadedPartition*> batch_ptrs;
      std::vector<std::size_t> indices(batch.size());
      for (auto& lp : batch) batch_ptrs.push_back(&lp);
      // change_src partition indices are not used in rotating staging (the
      // bitmap travels with the change below), so batch-local indices do.
      std::iota(indices.begin(), indices.end(), 0);

      StepOutput batch_out;
      compute_batch(batch_ptrs, ranges, indices, nullptr, storages, superstep, gsum_prev,
                    batch_out);

      // Persist partial results (full local array + next-superstep actives).
      for (std::size_t i = 0; i < batch.size(); ++i) {
        LoadedPartition& lp = batch[i];
        std::vector<bool> active(activation_ ? lp.active_pending
                                             : std::vector<bool>(lp.part.inner_count(), false));
        maas_.put(keys::result(superstep, lp.part.pid),
                  encode_rotating_result(lp.storage, active));
      }

      // Collect staged updates: one entry per changed vertex with any
      // adjacent partition; the next owner may be anyone, including us.
      for (std::size_t k = 0; k < batch_out.changes.size(); ++k) {
        auto [bi, slot] = batch_out.change_src[k];
        if (batch[bi].part.adj_partitions[slot].any())
          staged_rotating_.push_back(batch_out.changes[k]);
      }
      out.any_change |= batch_out.any_change;
      out.global_sum += batch_out.global_sum;
      out.terminated |= batch_out.terminated;
      out.iterated += batch_out.iterated;

      claimed_count += static_cast<std::uint32_t>(batch.size());
      for (auto pid : batch_pids) this_superstep_pids.push_back(pid);
    }

    // Flush: identical aggregated block to every other worker, or per-vertex
    // keys when aggregation is off.
    std::uint64_t staged = staged_rotating_.size();
    if (config_.key_aggregation) {
      for (std::uint32_t w = 0; w < workers_; ++w)
        if (w != me_) flush_block(superstep, w, staged_rotating_);
      retained_ = std::move(staged_rotating_);
      retained_superstep_ = superstep;
    } else {
      for (const auto& [g, v] : staged_rotating_)
        maas_.put(keys::msg_vertex(superstep, g), pack_value(v));
      retained_.clear();
    }
    staged_rotating_.clear();
    if (registry_) registry_->record_staged_entries(static_cast<int>(me_), superstep, staged);

    finalize_superstep(superstep, out, claimed_count);

    preload_next(superstep, this_superstep_pids);
  }

  void preload_next(std::int64_t superstep, const std::vector<std::uint32_t>& resident) {
    if (!config_.preload) return;
    std::uint32_t pick = config_.partitions;
    for (std::uint32_t pid = 0; pid < config_.partitions; ++pid) {
      if (std::find(resident.begin(), resident.end(), pid) == resident.end()) {
        pick = pid;
        break;
      }
    }
    if (pick == config_.partitions) return;
    Preload pl;
    pl.pid = pick;
    pl.for_superstep = superstep + 1;
    pl.part = load_blob(pick);
    // Partial results for the next superstep may not be persisted yet; the
    // speculative read is best-effort.
    pl.result = maas_.get(keys::result(superstep, pick));
    preload_ = std::move(pl);
    if (registry_)
      registry_->record_event(static_cast<int>(me_), superstep, EventKind::Preload, pick);
  }

  // ---- state ----

  const JobConfig& config_;
  const AlgorithmInfo& info_;
  const CompressionCodec& codec_;
  MetricsRegistry* registry_;
  std::uint32_t me_;
  std::uint32_t workers_;
  bool rotating_;
  InstrumentedMaas maas_;
  std::chrono::microseconds poll_;
  PartitionManifest manifest_;
  std::unique_ptr<Algorithm> algorithm_;
  bool activation_ = false;
  std::int64_t activation_from_ = 0;
  std::vector<Bitmap> worker_bits_;
  std::vector<vid_t> bases_;

  // pinned
  bool pinned_loaded_ = false;
  std::vector<LoadedPartition> owned_;
  std::vector<std::uint64_t> storage_;
  std::unordered_map<vid_t, std::uint32_t> mirror_slot_;
  std::unordered_map<vid_t, std::vector<std::pair<std::size_t, lvid_t>>> mirror_holders_;
  std::vector<std::pair<vid_t, std::uint64_t>> changed_prev_;

  // rotating
  std::vector<std::pair<vid_t, std::uint64_t>> retained_;
  std::int64_t retained_superstep_ = -2;
  std::vector<std::pair<vid_t, std::uint64_t>> staged_rotating_;

  struct Preload {
    std::uint32_t pid = 0;
    std::int64_t for_superstep = 0;
    Partition part;
    std::optional<Bytes> result;
  };
  std::optional<Preload> preload_;

};

}  // namespace

void worker_main(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry,
                 std::uint32_t worker_id) {
  try {
    WorkerTask task(config, target, registry, worker_id);
    task.run();
  } catch (const std::exception& ex) {
    // Raise the error flag so the coordinator can abort promptly, then let
    // the launcher surface the failure.
    try {
      auto client = target.make_client();
      client->put_string(keys::ctl_error(static_cast<int>(worker_id)), ex.what());
    } catch (...) {
    }
    throw;
  }
}

}  // namespace weft

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
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "weft/bytes.hpp"

namespace weft {

// The external store every task coordinates through. Implementations must be
// safe under arbitrary concurrent callers (threads or processes); atomic_add
// is linearizable. get distinguishes an absent key from an empty value.
class MaasClient {
 public:
  virtual ~MaasClient() = default;

  virtual void put(std::string_view key, ByteSpan value) = 0;
  virtual std::optional<Bytes> get(std::string_view key) = 0;
  virtual bool exists(std::string_view key) = 0;
  virtual void del(std::string_view key) = 0;

  // Counters are decimal text values. Adding to an uninitialized counter is a
  // not-found error; returns the post-update value.
  virtual std::int64_t atomic_add(std::string_view key, std::int64_t delta) = 0;

  // Flags: idempotent set, presence test, clear.
  virtual void set_flag(std::string_view key) = 0;
  virtual bool flag_set(std::string_view key) = 0;
  virtual void clear_flag(std::string_view key) = 0;

  // Polling aid: blocks up to `timeout`, possibly waking earlier if the
  // backend can observe mutations. Purely an efficiency hint.
  virtual void wait_hint(std::chrono::microseconds timeout) = 0;

  // Convenience over put/get for decimal-text counters.
  void put_counter(std::string_view key, std::int64_t v);
  std::optional<std::int64_t> read_counter(std::string_view key);

  void put_string(std::string_view key, const std::string& s);
  std::optional<std::string> get_string(std::string_view key);
};

// Shared in-process store backing mem:// clients. Mutations bump a version
// and notify waiters, so polling loops wake immediately in simulation runs.
class MemStore {
 public:
  friend class MemMaas;

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t version_ = 0;
  std::map<std::string, Bytes, std::less<>> data_;
};

class MemMaas : public MaasClient {
 public:
  explicit MemMaas(std::shared_ptr<MemStore> store) : store_(std::move(store)) {}

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
  std::shared_ptr<MemStore> store_;
};

// Filesystem store under a shared directory: one file per key, atomic puts
// via rename, counters protected by flock, flags as file existence. Works
// across processes.
class FileMaas : public MaasClient {
 public:
  explicit FileMaas(std::string root);

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
  std::string path_of(std::string_view key) const;
  std::string root_;
};

// A resolved maas-uri: mem:// shares an in-process store, file://<dir> a
// directory. Each task makes its own client. `wrap`, when set, decorates
// every client; tests use it to inject faults.
struct MaasTarget {
  std::string uri;
  std::shared_ptr<MemStore> mem;  // set iff mem://
  std::string dir;                // set iff file://
  std::function<std::unique_ptr<MaasClient>(std::unique_ptr<MaasClient>)> wrap;

  std::unique_ptr<MaasClient> make_client() const;
  bool is_mem() const { return mem != nullptr; }
};

MaasTarget open_maas(const std::string& uri);

// Key scheme. Namespaces: part (partition data), msg (superstep messages),
// result (partial/final values), ctl (job control).
namespace keys {

inline std::string manifest() { return "part/manifest"; }
inline std::string idmap() { return "part/idmap"; }
inline std::string part_blob(std::uint32_t pid) { return "part/" + std::to_string(pid); }

inline std::string msg_block(std::int64_t superstep, std::uint32_t src, std::uint32_t dst) {
  return "msg/" + std::to_string(superstep) + "/" + std::to_string(src) + "/" +
         std::to_string(dst);
}
inline std::string msg_vertex(std::int64_t superstep, vid_t v) {
  return "msg/" + std::to_string(superstep) + "/v/" + std::to_string(v);
}

inline std::string result(std::int64_t superstep, std::uint32_t pid) {
  return "result/" + std::to_string(superstep) + "/" + std::to_string(pid);
}
inline std::string result_final(std::uint32_t pid) {
  return "result/final/" + std::to_string(pid);
}

inline std::string ctl_job() { return "ctl/job"; }
inline std::string ctl_superstep() { return "ctl/superstep"; }
// The unfinished counter and the unclaimed queue are scoped by superstep: a
// straggler still finishing superstep s must not be able to consume tickets
// or barrier contributions belonging to s+1.
inline std::string ctl_unfinished(std::int64_t superstep) {
  return "ctl/unfinished/" + std::to_string(superstep);
}
inline std::string ctl_keep_computing() { return "ctl/keep"; }
inline std::string ctl_finish() { return "ctl/finish"; }
inline std::string ctl_terminate() { return "ctl/terminate"; }
inline std::string ctl_claim(std::int64_t superstep) {
  return "ctl/claim/" + std::to_string(superstep);
}
inline std::string ctl_error(int actor) { return "ctl/error/" + std::to_string(actor); }
inline std::string ctl_agg(std::int64_t superstep, std::uint32_t worker) {
  return "ctl/agg/" + std::to_string(superstep) + "/" + std::to_string(worker);
}

enum class Namespace { Part, Msg, Result, Ctl, Other };
Namespace namespace_of(std::string_view key);
std::string namespace_name(Namespace ns);

// For msg keys, the superstep component; nullopt otherwise.
std::optional<std::int64_t> msg_superstep(std::string_view key);

}  // namespace keys

// Atomic pop from the rotating-mode unclaimed queue, realized as a ticket
// counter over partition ids {0..p-1}; each id is claimed exactly once per
// superstep. Returns nullopt when the queue is exhausted.
std::optional<std::uint32_t> claim_next_partition(MaasClient& maas, std::int64_t superstep,
                                                  std::uint32_t num_partitions);

}  // namespace weft

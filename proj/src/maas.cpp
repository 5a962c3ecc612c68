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

#include "weft/maas.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

namespace weft {

void MaasClient::put_counter(std::string_view key, std::int64_t v) {
  std::string s = std::to_string(v);
  put(key, ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::optional<std::int64_t> MaasClient::read_counter(std::string_view key) {
  auto raw = get(key);
  if (!raw) return std::nullopt;
  std::int64_t v = 0;
  auto* first = reinterpret_cast<const char*>(raw->data());
  auto res = std::from_chars(first, first + raw->size(), v);
  if (res.ec != std::errc{}) throw StorageError("counter is not decimal text: " + std::string(key));
  return v;
}

void MaasClient::put_string(std::string_view key, const std::string& s) {
  put(key, ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::optional<std::string> MaasClient::get_string(std::string_view key) {
  auto raw = get(key);
  if (!raw) return std::nullopt;
  return std::string(reinterpret_cast<const char*>(raw->data()), raw->size());
}

// ---------------------------------------------------------------------------
// mem://

void MemMaas::put(std::string_view key, ByteSpan value) {
  std::lock_guard lock(store_->mu_);
  store_->data_[std::string(key)] = Bytes(value.begin(), value.end());
  ++store_->version_;
  store_->cv_.notify_all();
}

std::optional<Bytes> MemMaas::get(std::string_view key) {
  std::lock_guard lock(store_->mu_);
  auto it = store_->data_.find(key);
  if (it == store_->data_.end()) return std::nullopt;
  return it->second;
}

bool MemMaas::exists(std::string_view key) {
  std::lock_guard lock(store_->mu_);
  return store_->data_.find(key) != store_->data_.end();
}

void MemMaas::del(std::string_view key) {
  std::lock_guard lock(store_->mu_);
  auto it = store_->data_.find(key);
  if (it != store_->data_.end()) {
    store_->data_.erase(it);
    ++store_->version_;
    store_->cv_.notify_all();
  }
}

std::int64_t MemMaas::atomic_add(std::string_view key, std::int64_t delta) {
  std::lock_guard lock(store_->mu_);
  auto it = store_->data_.find(key);
  if (it == store_->data_.end())
    throw NotFoundError("atomic_add on uninitialized counter: " + std::string(key));
  std::int64_t v = 0;
  auto* first = reinterpret_cast<const char*>(it->second.data());
  auto res = std::from_chars(first, first + it->second.size(), v);
  if (res.ec != std::errc{}) throw StorageError("counter is not decimal text: " + std::string(key));
  v += delta;
  std::string s = std::to_string(v);
  it->second.assign(s.begin(), s.end());
  ++store_->version_;
  store_->cv_.notify_all();
  return v;
}

void MemMaas::set_flag(std::string_view key) { put(key, {}); }
bool MemMaas::flag_set(std::string_view key) { return exists(key); }
void MemMaas::clear_flag(std::string_view key) { del(key); }

void MemMaas::wait_hint(std::chrono::microseconds timeout) {
  std::unique_lock lock(store_->mu_);
  std::uint64_t seen = store_->version_;
  store_->cv_.wait_for(lock, timeout, [&] { return store_->version_ != seen; });
}

// ---------------------------------------------------------------------------
// file://

namespace {

void throw_errno(const std::string& what) {
  throw StorageError(what + ": " + std::strerror(errno));
}

class FdGuard {
 public:
  explicit FdGuard(int fd) : fd_(fd) {}
  ~FdGuard() {
    if (fd_ >= 0) ::close(fd_);
  }
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

}  // namespace

FileMaas::FileMaas(std::string root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec && !std::filesystem::is_directory(root_))
    throw StorageError("cannot create store directory " + root_);
}

std::string FileMaas::path_of(std::string_view key) const {
  return root_ + "/" + std::string(key);
}

void FileMaas::put(std::string_view key, ByteSpan value) {
  std::string path = path_of(key);
  std::error_code ec;
  std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
  std::string tmp = path + ".tmp." + std::to_string(::getpid()) + "." +
                    std::to_string(reinterpret_cast<std::uintptr_t>(&value));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(value.data()),
              static_cast<std::streamsize>(value.size()));
    if (!out) throw StorageError("short write to " + tmp);
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) throw_errno("rename " + path);
}

std::optional<Bytes> FileMaas::get(std::string_view key) {
  std::ifstream in(path_of(key), std::ios::binary);
  if (!in) return std::nullopt;
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

bool FileMaas::exists(std::string_view key) {
  struct stat st;
  return ::stat(path_of(key).c_str(), &st) == 0;
}

void FileMaas::del(std::string_view key) {
  ::unlink(path_of(key).c_str());
}

std::int64_t FileMaas::atomic_add(std::string_view key, std::int64_t delta) {
  // Serialization happens on a side lock file; the value file itself is only
  // ever replaced by rename, so unlocked readers never see a torn counter.
  std::string path = path_of(key);
  std::string lock_path = path + ".lock";
  int fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
  if (fd < 0) {
    // A missing parent directory means the counter was never initialized;
    // put_counter creates the directory chain.
    if (errno == ENOENT)
      throw NotFoundError("atomic_add on uninitialized counter: " + std::string(key));
    throw_errno("open " + lock_path);
  }
  FdGuard guard(fd);
  if (::flock(fd, LOCK_EX) != 0) throw_errno("flock " + lock_path);

  auto raw = get(key);
  if (!raw) throw NotFoundError("atomic_add on uninitialized counter: " + std::string(key));
  std::int64_t v = 0;
  auto* first = reinterpret_cast<const char*>(raw->data());
  auto res = std::from_chars(first, first + raw->size(), v);
  if (res.ec != std::errc{})
    throw StorageError("counter is not decimal text: " + std::string(key));
  v += delta;
  std::string s = std::to_string(v);
  put(key, ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  // flock released on close.
  return v;
}

void FileMaas::set_flag(std::string_view key) { put(key, {}); }
bool FileMaas::flag_set(std::string_view key) { return exists(key); }
void FileMaas::clear_flag(std::string_view key) { del(key); }

void FileMaas::wait_hint(std::chrono::microseconds timeout) {
  std::this_thread::sleep_for(timeout);
}

// ---------------------------------------------------------------------------

std::unique_ptr<MaasClient> MaasTarget::make_client() const {
  std::unique_ptr<MaasClient> client;
  if (mem)
    client = std::make_unique<MemMaas>(mem);
  else
    client = std::make_unique<FileMaas>(dir);
  return wrap ? wrap(std::move(client)) : std::move(client);
}

MaasTarget open_maas(const std::string& uri) {
  MaasTarget t;
  t.uri = uri;
  if (uri.rfind("mem://", 0) == 0) {
    t.mem = std::make_shared<MemStore>();
    return t;
  }
  if (uri.rfind("file://", 0) == 0) {
    t.dir = uri.substr(7);
    if (t.dir.empty()) throw SetupError("file:// uri needs a directory");
    return t;
  }
  throw SetupError("unsupported maas uri (expected mem:// or file://<dir>): " + uri);
}

namespace keys {

Namespace namespace_of(std::string_view key) {
  auto slash = key.find('/');
  std::string_view head = slash == std::string_view::npos ? key : key.substr(0, slash);
  if (head == "part") return Namespace::Part;
  if (head == "msg") return Namespace::Msg;
  if (head == "result") return Namespace::Result;
  if (head == "ctl") return Namespace::Ctl;
  return Namespace::Other;
}

std::string namespace_name(Namespace ns) {
  switch (ns) {
    case Namespace::Part: return "part";
    case Namespace::Msg: return "msg";
    case Namespace::Result: return "result";
    case Namespace::Ctl: return "ctl";
    case Namespace::Other: return "other";
  }
  return "?";
}

std::optional<std::int64_t> msg_superstep(std::string_view key) {
  if (key.rfind("msg/", 0) != 0) return std::nullopt;
  std::string_view rest = key.substr(4);
  auto slash = rest.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  std::int64_t s = 0;
  auto res = std::from_chars(rest.data(), rest.data() + slash, s);
  if (res.ec != std::errc{}) return std::nullopt;
  return s;
}

}  // namespace keys

std::optional<std::uint32_t> claim_next_partition(MaasClient& maas, std::int64_t superstep,
                                                  std::uint32_t num_partitions) {
  std::int64_t ticket = maas.atomic_add(keys::ctl_claim(superstep), 1) - 1;
  if (ticket < 0 || ticket >= static_cast<std::int64_t>(num_partitions)) return std::nullopt;
  return static_cast<std::uint32_t>(ticket);
}

}  // namespace weft

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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace weft {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// Global vertex id, dense in [0, v) after ingestion.
using vid_t = std::uint64_t;
// Partition-local slot index: inner slots first, then outer slots.
using lvid_t = std::uint32_t;

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StorageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A key lookup that found nothing where a value was required.
struct NotFoundError : StorageError {
  using StorageError::StorageError;
};

struct JobError : std::runtime_error {
  JobError(const std::string& msg, std::int64_t superstep)
      : std::runtime_error(msg + " (superstep " + std::to_string(superstep) + ")"),
        superstep(superstep) {}
  std::int64_t superstep;
};

// All fixed-width fields in serialized blobs are little-endian.
inline void put_u32_le(Bytes& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

inline void put_u64_le(Bytes& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

inline std::uint32_t get_u32_le(ByteSpan in, std::size_t& off) {
  if (off + 4 > in.size()) throw CodecError("truncated u32");
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
  off += 4;
  return x;
}

inline std::uint64_t get_u64_le(ByteSpan in, std::size_t& off) {
  if (off + 8 > in.size()) throw CodecError("truncated u64");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  off += 8;
  return x;
}

inline void put_f64_le(Bytes& out, double x) { put_u64_le(out, std::bit_cast<std::uint64_t>(x)); }

inline double get_f64_le(ByteSpan in, std::size_t& off) {
  return std::bit_cast<double>(get_u64_le(in, off));
}

// Value slots hold raw 64-bit patterns; algorithms interpret them.
inline std::uint64_t value_from_i64(std::int64_t x) { return std::bit_cast<std::uint64_t>(x); }
inline std::int64_t value_as_i64(std::uint64_t v) { return std::bit_cast<std::int64_t>(v); }
inline std::uint64_t value_from_f64(double x) { return std::bit_cast<std::uint64_t>(x); }
inline double value_as_f64(std::uint64_t v) { return std::bit_cast<double>(v); }

inline std::uint64_t fnv1a64(ByteSpan data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace weft

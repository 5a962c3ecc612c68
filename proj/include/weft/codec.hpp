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
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weft/bytes.hpp"
#include "weft/partition.hpp"
#include "weft/varint.hpp"

namespace weft {

// Delta-varint adjacency encoding: count, first id, then successive
// differences, all varints. Input must be strictly ascending. Weights, when
// present, follow as little-endian doubles in the same order.
void encode_adjacency(std::span<const std::uint64_t> sorted_dsts, std::span<const double> weights,
                      Bytes& out);

struct DecodedAdjacency {
  std::vector<std::uint64_t> dsts;
  std::vector<double> weights;
};

DecodedAdjacency decode_adjacency(ByteSpan in, std::size_t& off, bool weighted);

// Aggregated update payload from one worker to another for one superstep.
// Entries are (global vertex id, raw value pattern), sorted by id, unique.
struct MessageBlock {
  std::uint32_t src_worker = 0;
  std::uint32_t dst_worker = 0;
  std::int64_t superstep = 0;
  std::uint8_t value_width = 8;  // 4 or 8
  std::vector<std::pair<vid_t, std::uint64_t>> entries;

  bool operator==(const MessageBlock&) const = default;
};

Bytes encode_message_block(const MessageBlock& block);
// `expected_width` of 0 accepts any width; otherwise a mismatch with the
// registered value type is a codec error.
MessageBlock decode_message_block(ByteSpan in, std::uint8_t expected_width);

// Partition blob layout (bit-exact):
//   magic "GFP1" | flags byte (bit0 directed, bit1 weighted) | varint p |
//   varint pid | varint inner count | varint outer count |
//   outer global ids as first + deltas (varints, no extra count) |
//   per-inner-vertex adjacency via encode_adjacency (local slot ids) |
//   per-inner-vertex adjacent-partition bitmap, ceil(p/8) bytes each.
// Inner global ids are not stored: they are the contiguous range starting at
// the manifest's inner_base for this pid, so serialization requires a
// contiguous inner range.
Bytes serialize_partition(const Partition& part);
Partition deserialize_partition(ByteSpan in, vid_t inner_base);

// Value arrays (rotating-mode partial results, final results): varint count,
// then count fixed-width little-endian values.
Bytes encode_value_array(std::span<const std::uint64_t> values, std::uint8_t width);
std::vector<std::uint64_t> decode_value_array(ByteSpan in, std::size_t& off, std::uint8_t width);

// Lossless byte-level transform applied to encoded message blocks when
// enabled. Both sides of a job use the same codec, so the frame carries no
// codec tag. "identity" ships as the default.
class CompressionCodec {
 public:
  virtual ~CompressionCodec() = default;
  virtual std::string name() const = 0;
  virtual Bytes compress(ByteSpan in) const = 0;
  virtual Bytes decompress(ByteSpan in) const = 0;
};

const CompressionCodec& identity_codec();
// Registry lookup; unknown name is a setup error. Tests register extra codecs.
const CompressionCodec& find_codec(const std::string& name);
void register_codec(std::unique_ptr<CompressionCodec> codec);

}  // namespace weft

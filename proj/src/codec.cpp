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

#include "weft/codec.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace weft {

namespace {
constexpr char kMagic[4] = {'G', 'F', 'P', '1'};

void put_value(Bytes& out, std::uint64_t v, std::uint8_t width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_value(ByteSpan in, std::size_t& off, std::uint8_t width) {
  if (off + width > in.size()) throw CodecError("truncated value");
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  off += width;
  return v;
}
}  // namespace

void encode_adjacency(std::span<const std::uint64_t> sorted_dsts, std::span<const double> weights,
                      Bytes& out) {
  for (std::size_t i = 1; i < sorted_dsts.size(); ++i)
    if (sorted_dsts[i] <= sorted_dsts[i - 1])
      throw CodecError("encode_adjacency: input not strictly ascending");
  if (!weights.empty() && weights.size() != sorted_dsts.size())
    throw CodecError("encode_adjacency: weight count mismatch");

  varint_encode(sorted_dsts.size(), out);
  if (!sorted_dsts.empty()) {
    varint_encode(sorted_dsts[0], out);
    for (std::size_t i = 1; i < sorted_dsts.size(); ++i)
      varint_encode(sorted_dsts[i] - sorted_dsts[i - 1], out);
  }
  for (double w : weights) put_f64_le(out, w);
}

DecodedAdjacency decode_adjacency(ByteSpan in, std::size_t& off, bool weighted) {
  DecodedAdjacency adj;
  std::uint64_t count = varint_decode(in, off);
  adj.dsts.reserve(count);
  std::uint64_t prev = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t d = varint_decode(in, off);
    prev = (i == 0) ? d : prev + d;
    adj.dsts.push_back(prev);
  }
  if (weighted) {
    adj.weights.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) adj.weights.push_back(get_f64_le(in, off));
  }
  return adj;
}

Bytes encode_message_block(const MessageBlock& block) {
  for (std::size_t i = 1; i < block.entries.size(); ++i)
    if (block.entries[i].first <= block.entries[i - 1].first)
      throw CodecError("message block entries not sorted/unique");

  Bytes out;
  varint_encode(block.src_worker, out);
  varint_encode(block.dst_worker, out);
  varint_encode(static_cast<std::uint64_t>(block.superstep), out);
  varint_encode(block.entries.size(), out);
  varint_encode(block.value_width, out);
  vid_t prev = 0;
  for (std::size_t i = 0; i < block.entries.size(); ++i) {
    vid_t id = block.entries[i].first;
    varint_encode(i == 0 ? id : id - prev, out);
    prev = id;
  }
  for (const auto& [id, v] : block.entries) put_value(out, v, block.value_width);
  return out;
}

MessageBlock decode_message_block(ByteSpan in, std::uint8_t expected_width) {
  std::size_t off = 0;
  MessageBlock block;
  block.src_worker = static_cast<std::uint32_t>(varint_decode(in, off));
  block.dst_worker = static_cast<std::uint32_t>(varint_decode(in, off));
  block.superstep = static_cast<std::int64_t>(varint_decode(in, off));
  std::uint64_t count = varint_decode(in, off);
  std::uint64_t width = varint_decode(in, off);
  if (width != 4 && width != 8) throw CodecError("bad value width " + std::to_string(width));
  if (expected_width != 0 && width != expected_width)
    throw CodecError("value width " + std::to_string(width) + " does not match registered type");
  block.value_width = static_cast<std::uint8_t>(width);

  std::vector<vid_t> ids;
  ids.reserve(count);
  vid_t prev = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t d = varint_decode(in, off);
    prev = (i == 0) ? d : prev + d;
    ids.push_back(prev);
  }
  block.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i)
    block.entries.emplace_back(ids[i], get_value(in, off, block.value_width));
  if (off != in.size()) throw CodecError("trailing bytes in message block");
  return block;
}

Bytes serialize_partition(const Partition& part) {
  if (!part.inner_contiguous())
    throw CodecError("partition blob requires a contiguous inner id range");

  Bytes out;
  out.insert(out.end(), kMagic, kMagic + 4);
  std::uint8_t flags = 0;
  if (part.directed) flags |= 0x01;
  if (part.weighted) flags |= 0x02;
  out.push_back(flags);
  varint_encode(part.num_partitions, out);
  varint_encode(part.pid, out);
  varint_encode(part.inner_count(), out);
  varint_encode(part.outer_count(), out);

  for (std::size_t i = 0; i < part.outer_globals.size(); ++i)
    varint_encode(i == 0 ? part.outer_globals[0]
                         : part.outer_globals[i] - part.outer_globals[i - 1],
                  out);

  std::vector<std::uint64_t> row;
  for (lvid_t l = 0; l < part.inner_count(); ++l) {
    auto nbrs = part.neighbors(l);
    row.assign(nbrs.begin(), nbrs.end());
    encode_adjacency(row, part.neighbor_weights(l), out);
  }
  for (lvid_t l = 0; l < part.inner_count(); ++l) {
    Bytes bm = part.adj_partitions[l].to_bytes();
    out.insert(out.end(), bm.begin(), bm.end());
  }
  return out;
}

Partition deserialize_partition(ByteSpan in, vid_t inner_base) {
  if (in.size() < 5 || !std::equal(kMagic, kMagic + 4, in.begin()))
    throw CodecError("bad partition blob magic");
  std::size_t off = 4;
  std::uint8_t flags = in[off++];

  Partition part;
  part.directed = flags & 0x01;
  part.weighted = flags & 0x02;
  part.num_partitions = static_cast<std::uint32_t>(varint_decode(in, off));
  part.pid = static_cast<std::uint32_t>(varint_decode(in, off));
  std::uint64_t ni = varint_decode(in, off);
  std::uint64_t no = varint_decode(in, off);

  part.inner_globals.reserve(ni);
  for (std::uint64_t i = 0; i < ni; ++i) part.inner_globals.push_back(inner_base + i);

  part.outer_globals.reserve(no);
  vid_t prev = 0;
  for (std::uint64_t i = 0; i < no; ++i) {
    std::uint64_t d = varint_decode(in, off);
    prev = (i == 0) ? d : prev + d;
    part.outer_globals.push_back(prev);
  }

  part.adj_offsets.assign(1, 0);
  for (std::uint64_t l = 0; l < ni; ++l) {
    DecodedAdjacency adj = decode_adjacency(in, off, part.weighted);
    for (std::uint64_t t : adj.dsts) {
      if (t >= ni + no) throw CodecError("adjacency target out of local range");
      part.adj_targets.push_back(static_cast<lvid_t>(t));
    }
    part.adj_weights.insert(part.adj_weights.end(), adj.weights.begin(), adj.weights.end());
    part.adj_offsets.push_back(part.adj_targets.size());
  }

  std::size_t bm_bytes = (part.num_partitions + 7) / 8;
  part.adj_partitions.reserve(ni);
  for (std::uint64_t l = 0; l < ni; ++l) {
    if (off + bm_bytes > in.size()) throw CodecError("truncated partition bitmaps");
    part.adj_partitions.push_back(
        Bitmap::from_bytes(in.subspan(off, bm_bytes), part.num_partitions));
    off += bm_bytes;
  }
  if (off != in.size()) throw CodecError("trailing bytes in partition blob");
  return part;
}

Bytes encode_value_array(std::span<const std::uint64_t> values, std::uint8_t width) {
  Bytes out;
  varint_encode(values.size(), out);
  for (std::uint64_t v : values) put_value(out, v, width);
  return out;
}

std::vector<std::uint64_t> decode_value_array(ByteSpan in, std::size_t& off, std::uint8_t width) {
  std::uint64_t count = varint_decode(in, off);
  std::vector<std::uint64_t> values;
  values.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) values.push_back(get_value(in, off, width));
  return values;
}

namespace {

class IdentityCodec : public CompressionCodec {
 public:
  std::string name() const override { return "identity"; }
  Bytes compress(ByteSpan in) const override { return Bytes(in.begin(), in.end()); }
  Bytes decompress(ByteSpan in) const override { return Bytes(in.begin(), in.end()); }
};

std::map<std::string, std::unique_ptr<CompressionCodec>>& codec_registry() {
  static std::map<std::string, std::unique_ptr<CompressionCodec>> reg;
  return reg;
}

std::mutex& codec_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

const CompressionCodec& identity_codec() {
  static IdentityCodec codec;
  return codec;
}

const CompressionCodec& find_codec(const std::string& name) {
  if (name.empty() || name == "identity") return identity_codec();
  std::lock_guard lock(codec_mutex());
  auto it = codec_registry().find(name);
  if (it == codec_registry().end()) throw SetupError("unknown compression codec: " + name);
  return *it->second;
}

void register_codec(std::unique_ptr<CompressionCodec> codec) {
  std::lock_guard lock(codec_mutex());
  std::string name = codec->name();
  if (name == "identity" || !codec_registry().emplace(name, std::move(codec)).second)
    throw SetupError("compression codec already registered: " + name);
}

}  // namespace weft

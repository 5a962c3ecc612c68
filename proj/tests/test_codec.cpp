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

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "weft/codec.hpp"
#include "weft/graph.hpp"

using namespace weft;

TEST_CASE("adjacency encoding of [5,7,1000] is varints of 3,5,2,993") {
  std::vector<std::uint64_t> dsts{5, 7, 1000};
  Bytes out;
  encode_adjacency(dsts, {}, out);
  // 993 = 0b1111100001 -> 0xE1 0x07.
  CHECK(out == Bytes{0x03, 0x05, 0x02, 0xE1, 0x07});
}

TEST_CASE("adjacency encoding of empty list is a single zero varint") {
  Bytes out;
  encode_adjacency({}, {}, out);
  CHECK(out == Bytes{0x00});
}

TEST_CASE("adjacency encoder rejects unsorted input") {
  std::vector<std::uint64_t> dsts{5, 5};
  Bytes out;
  CHECK_THROWS_AS(encode_adjacency(dsts, {}, out), CodecError);
}

TEST_CASE("adjacency roundtrip and size bound for small ids") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t count = rng() % 60;
    std::set<std::uint64_t> ids;
    while (ids.size() < count) ids.insert(rng() % (1u << 28));
    std::vector<std::uint64_t> dsts(ids.begin(), ids.end());

    Bytes out;
    encode_adjacency(dsts, {}, out);
    std::size_t off = 0;
    DecodedAdjacency dec = decode_adjacency(out, off, false);
    CHECK(dec.dsts == dsts);
    CHECK(off == out.size());
    // Deltas below 2^28 need at most 4 bytes each; header = count + first id.
    std::size_t header = varint_encode(count).size() +
                         (count ? varint_encode(dsts[0]).size() : 0);
    CHECK(out.size() <= 4 * (count ? count - 1 : 0) + header);
    if (count > 1)
      for (std::size_t i = 1; i < dec.dsts.size(); ++i) CHECK(dec.dsts[i] > dec.dsts[i - 1]);
  }
}

TEST_CASE("message block: empty block roundtrips to empty") {
  MessageBlock block;
  block.src_worker = 3;
  block.dst_worker = 1;
  block.superstep = 7;
  block.value_width = 8;
  Bytes enc = encode_message_block(block);
  MessageBlock dec = decode_message_block(enc, 8);
  CHECK(dec == block);
}

TEST_CASE("message block roundtrips entries") {
  MessageBlock block;
  block.src_worker = 0;
  block.dst_worker = 2;
  block.superstep = 4;
  block.value_width = 8;
  block.entries = {{3, value_from_i64(7)}, {9, value_from_i64(1)}};
  MessageBlock dec = decode_message_block(encode_message_block(block), 8);
  CHECK(dec == block);
}

TEST_CASE("message block width mismatch is a codec error") {
  MessageBlock block;
  block.value_width = 4;
  Bytes enc = encode_message_block(block);
  CHECK_THROWS_AS(decode_message_block(enc, 8), CodecError);
}

TEST_CASE("message block randomized roundtrip, widths 4 and 8") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 10000; ++trial) {
    MessageBlock block;
    block.src_worker = static_cast<std::uint32_t>(rng() % 16);
    block.dst_worker = static_cast<std::uint32_t>(rng() % 16);
    block.superstep = static_cast<std::int64_t>(rng() % 1000);
    block.value_width = (rng() & 1) ? 8 : 4;
    std::size_t count = rng() % 20;
    std::set<vid_t> ids;
    while (ids.size() < count) ids.insert(rng() % 100000);
    for (vid_t id : ids) {
      std::uint64_t v = rng();
      if (block.value_width == 4) v &= 0xFFFFFFFFULL;
      block.entries.emplace_back(id, v);
    }
    MessageBlock dec = decode_message_block(encode_message_block(block), block.value_width);
    CHECK(dec == block);
  }
}

TEST_CASE("10k-entry block is smaller than its decimal text rendering") {
  MessageBlock block;
  block.value_width = 8;
  std::mt19937_64 rng(5);
  std::set<vid_t> ids;
  while (ids.size() < 10000) ids.insert(rng() % 10000000);
  std::ostringstream text;
  for (vid_t id : ids) {
    std::int64_t v = static_cast<std::int64_t>(rng() % 1000000);
    block.entries.emplace_back(id, value_from_i64(v));
    text << id << ' ' << v << '\n';
  }
  Bytes enc = encode_message_block(block);
  CHECK(enc.size() < text.str().size());
}

// ---------------------------------------------------------------------------
// Partition blob golden vectors, drawn out byte by byte.

TEST_CASE("blob golden vector A: single partition, three isolated vertices") {
  Partition part;
  part.pid = 0;
  part.num_partitions = 1;
  part.inner_globals = {0, 1, 2};
  part.adj_offsets = {0, 0, 0, 0};
  part.adj_partitions.assign(3, Bitmap(1));

  Bytes expect{'G', 'F', 'P', '1',
               0x00,              // flags
               0x01, 0x00,        // p, pid
               0x03, 0x00,        // inner, outer counts
               0x00, 0x00, 0x00,  // three empty adjacency rows
               0x00, 0x00, 0x00}; // three 1-byte bitmaps
  CHECK(serialize_partition(part) == expect);

  Partition dec = deserialize_partition(expect, 0);
  CHECK(dec.inner_globals == part.inner_globals);
  CHECK(dec.outer_count() == 0);
  CHECK(dec.edge_count() == 0);
}

TEST_CASE("blob golden vector B: path partition with one mirror") {
  // Partition 0 of the 5-path split {0,1 | 2,3,4}: inner 0,1; outer {2};
  // local rows 0:[1], 1:[0,2]; bitmaps 0x00, 0x02.
  GlobalGraph g =
      build_global_graph({{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {3, 4, 0}}, 5, false, false);
  std::vector<std::uint32_t> assignment{0, 0, 1, 1, 1};
  Partition part = remap_partition(g, assignment, 0, 2);

  Bytes expect{'G', 'F', 'P', '1',
               0x00,
               0x02, 0x00,        // p=2, pid=0
               0x02, 0x01,        // inner=2, outer=1
               0x02,              // outer list: first id 2
               0x01, 0x01,        // row 0: count 1, first 1
               0x02, 0x00, 0x02,  // row 1: count 2, first 0, delta 2
               0x00, 0x02};       // bitmaps
  CHECK(serialize_partition(part) == expect);

  Partition dec = deserialize_partition(expect, 0);
  CHECK(dec.outer_globals == std::vector<vid_t>{2});
  CHECK(dec.neighbors(1).size() == 2);
}

TEST_CASE("blob golden vector C: weighted directed with multi-byte varints") {
  Partition part;
  part.pid = 1;
  part.num_partitions = 3;
  part.directed = true;
  part.weighted = true;
  part.inner_globals = {300};
  part.outer_globals = {5, 1000};
  part.adj_offsets = {0, 2};
  part.adj_targets = {1, 2};  // the two outer slots
  part.adj_weights = {0.5, -2.0};
  Bitmap bm(3);
  bm.set(0);
  bm.set(2);
  part.adj_partitions = {bm};

  Bytes expect{'G', 'F', 'P', '1',
               0x03,              // directed | weighted
               0x03, 0x01,        // p=3, pid=1
               0x01, 0x02,        // inner=1, outer=2
               0x05, 0xE3, 0x07,  // outer: 5, delta 995
               0x02, 0x01, 0x01,  // row: count 2, first slot 1, delta 1
               // weights 0.5 and -2.0, little-endian doubles
               0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xE0, 0x3F,
               0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xC0,
               0x05};             // bitmap {0,2}
  CHECK(serialize_partition(part) == expect);

  Partition dec = deserialize_partition(expect, 300);
  CHECK(dec.inner_globals == std::vector<vid_t>{300});
  CHECK(dec.outer_globals == std::vector<vid_t>{5, 1000});
  CHECK(dec.neighbor_weights(0)[1] == -2.0);
  CHECK(dec.adj_partitions[0] == bm);
}

TEST_CASE("blob serialization requires contiguous inner range") {
  Partition part;
  part.pid = 0;
  part.num_partitions = 1;
  part.inner_globals = {0, 2};
  part.adj_offsets = {0, 0, 0};
  part.adj_partitions.assign(2, Bitmap(1));
  CHECK_THROWS_AS(serialize_partition(part), CodecError);
}

TEST_CASE("partition blob randomized roundtrip") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const vid_t n = 40 + rng() % 80;
    const std::uint32_t p = 1 + static_cast<std::uint32_t>(rng() % 6);
    bool weighted = rng() & 1;
    GlobalGraph g = random_graph(n, 5.0, rng() & 1, weighted, rng());
    // Contiguous assignment so blobs are serializable.
    std::vector<std::uint32_t> assignment(n);
    for (vid_t v = 0; v < n; ++v)
      assignment[v] = static_cast<std::uint32_t>(v * static_cast<std::uint64_t>(p) / n);
    for (std::uint32_t pid = 0; pid < p; ++pid) {
      Partition part = remap_partition(g, assignment, pid, p);
      Bytes blob = serialize_partition(part);
      Partition dec = deserialize_partition(blob, part.inner_base());
      CHECK(dec.inner_globals == part.inner_globals);
      CHECK(dec.outer_globals == part.outer_globals);
      CHECK(dec.adj_offsets == part.adj_offsets);
      CHECK(dec.adj_targets == part.adj_targets);
      CHECK(dec.adj_weights == part.adj_weights);
      REQUIRE(dec.adj_partitions.size() == part.adj_partitions.size());
      for (std::size_t i = 0; i < dec.adj_partitions.size(); ++i)
        CHECK(dec.adj_partitions[i] == part.adj_partitions[i]);
      // Byte-for-byte determinism through a re-encode.
      CHECK(serialize_partition(dec) == blob);
    }
  }
}

TEST_CASE("value array roundtrip at widths 4 and 8") {
  std::mt19937_64 rng(77);
  for (std::uint8_t width : {std::uint8_t{4}, std::uint8_t{8}}) {
    std::vector<std::uint64_t> values;
    for (int i = 0; i < 100; ++i) {
      std::uint64_t v = rng();
      if (width == 4) v &= 0xFFFFFFFFULL;
      values.push_back(v);
    }
    Bytes enc = encode_value_array(values, width);
    std::size_t off = 0;
    CHECK(decode_value_array(enc, off, width) == values);
    CHECK(off == enc.size());
  }
}

namespace {

// Trivial reversible transform standing in for a real compressor.
class XorCodec : public CompressionCodec {
 public:
  std::string name() const override { return "xor-test"; }
  Bytes compress(ByteSpan in) const override {
    Bytes out(in.begin(), in.end());
    for (auto& b : out) b ^= 0x5A;
    return out;
  }
  Bytes decompress(ByteSpan in) const override { return compress(in); }
};

}  // namespace

TEST_CASE("compression hook is semantics-transparent") {
  static bool registered = false;
  if (!registered) {
    register_codec(std::make_unique<XorCodec>());
    registered = true;
  }
  const CompressionCodec& codec = find_codec("xor-test");
  MessageBlock block;
  block.value_width = 8;
  block.entries = {{1, 42}, {5, 99}};
  Bytes plain = encode_message_block(block);
  Bytes framed = codec.compress(plain);
  CHECK(framed != plain);
  CHECK(decode_message_block(codec.decompress(framed), 8) == block);
  CHECK(find_codec("identity").compress(plain) == plain);
  CHECK_THROWS_AS(find_codec("bogus"), SetupError);
}

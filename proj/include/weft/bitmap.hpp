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
#include <cstdint>
#include <cstddef>
#include <limits>
#include <vector>

#include "weft/bytes.hpp"

namespace weft {

// Fixed-width bit vector. Used both for a vertex's adjacent-partition set
// and for a worker's partition-assignment set; both are p bits wide.
class Bitmap {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  Bitmap() = default;
  explicit Bitmap(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }

  void set(std::size_t i) { words_[i >> 6] |= (1ULL << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::size_t lowest_set() const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi)
      if (words_[wi]) return wi * 64 + static_cast<std::size_t>(std::countr_zero(words_[wi]));
    return npos;
  }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        std::size_t bit = static_cast<std::size_t>(std::countr_zero(w));
        fn(wi * 64 + bit);
        w &= w - 1;
      }
    }
  }

  Bitmap& operator&=(const Bitmap& other) {
    if (other.nbits_ != nbits_) throw std::logic_error("bitmap width mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }

  bool operator==(const Bitmap& other) const = default;

  // ceil(size/8) bytes, LSB-first within each byte.
  Bytes to_bytes() const {
    Bytes out((nbits_ + 7) / 8, 0);
    for_each_set([&](std::size_t i) { out[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7)); });
    return out;
  }

  static Bitmap from_bytes(ByteSpan in, std::size_t nbits) {
    if (in.size() < (nbits + 7) / 8) throw CodecError("truncated bitmap");
    Bitmap bm(nbits);
    for (std::size_t i = 0; i < nbits; ++i)
      if ((in[i >> 3] >> (i & 7)) & 1u) bm.set(i);
    return bm;
  }

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Bitwise masked intersection of a vertex's adjacent-partition bitmap with a
// worker's partition-assignment bitmap. The lowest set bit of the result is
// the representative partition when co-location dedup is on.
inline Bitmap masked_intersection(const Bitmap& vertex_bits, const Bitmap& worker_bits) {
  if (vertex_bits.size() != worker_bits.size())
    throw std::logic_error("masked_intersection: bitmap width mismatch");
  Bitmap r = vertex_bits;
  r &= worker_bits;
  return r;
}

}  // namespace weft

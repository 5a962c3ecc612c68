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
#include <utility>

#include "weft/bytes.hpp"

namespace weft {

// LEB128-style unsigned varint: 7 bits per byte, high bit = continuation.
inline void varint_encode(std::uint64_t n, Bytes& out) {
  while (n >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(n) | 0x80u);
    n >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(n));
}

inline Bytes varint_encode(std::uint64_t n) {
  Bytes out;
  varint_encode(n, out);
  return out;
}

// Decodes one varint starting at `off`, advancing it past the consumed bytes.
// Truncated input or more than 10 bytes is a codec error.
inline std::uint64_t varint_decode(ByteSpan in, std::size_t& off) {
  std::uint64_t n = 0;
  int shift = 0;
  for (int i = 0; i < 10; ++i) {
    if (off >= in.size()) throw CodecError("truncated varint");
    std::uint8_t b = in[off++];
    n |= static_cast<std::uint64_t>(b & 0x7Fu) << shift;
    if (!(b & 0x80u)) return n;
    shift += 7;
  }
  throw CodecError("varint longer than 10 bytes");
}

// Convenience form returning (value, bytes consumed).
inline std::pair<std::uint64_t, std::size_t> varint_decode(ByteSpan in) {
  std::size_t off = 0;
  std::uint64_t n = varint_decode(in, off);
  return {n, off};
}

}  // namespace weft

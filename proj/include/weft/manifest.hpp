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
#include <string>
#include <vector>

#include "weft/bytes.hpp"
#include "weft/graph.hpp"

namespace weft {

struct PartitionEntry {
  std::uint32_t pid = 0;
  vid_t inner_base = 0;
  std::uint64_t inner_count = 0;
  std::uint64_t edge_count = 0;
  std::uint64_t bytes = 0;
  std::uint64_t checksum = 0;  // fnv1a64 of the blob
};

// Job-level description of an uploaded partition set, stored at part/manifest.
struct PartitionManifest {
  vid_t vertex_count = 0;
  std::uint32_t num_partitions = 0;
  bool directed = false;
  bool weighted = false;
  ViewKind view = ViewKind::AsIs;
  std::vector<PartitionEntry> partitions;

  std::string to_json() const;
  static PartitionManifest from_json(const std::string& text);
};

}  // namespace weft

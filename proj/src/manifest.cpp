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

#include "weft/manifest.hpp"

#include <json.hpp>

namespace weft {

std::string PartitionManifest::to_json() const {
  nlohmann::json j;
  j["v"] = vertex_count;
  j["p"] = num_partitions;
  j["directed"] = directed;
  j["weighted"] = weighted;
  j["view"] = view_name(view);
  auto& parts = j["partitions"] = nlohmann::json::array();
  for (const auto& e : partitions) {
    parts.push_back({{"pid", e.pid},
                     {"inner_base", e.inner_base},
                     {"inner_count", e.inner_count},
                     {"edge_count", e.edge_count},
                     {"bytes", e.bytes},
                     {"checksum", e.checksum}});
  }
  return j.dump();
}

PartitionManifest PartitionManifest::from_json(const std::string& text) {
  PartitionManifest m;
  try {
    auto j = nlohmann::json::parse(text);
    m.vertex_count = j.at("v").get<vid_t>();
    m.num_partitions = j.at("p").get<std::uint32_t>();
    m.directed = j.at("directed").get<bool>();
    m.weighted = j.at("weighted").get<bool>();
    auto v = parse_view(j.at("view").get<std::string>());
    if (!v) throw SetupError("manifest has unknown view");
    m.view = *v;
    for (const auto& pj : j.at("partitions")) {
      PartitionEntry e;
      e.pid = pj.at("pid").get<std::uint32_t>();
      e.inner_base = pj.at("inner_base").get<vid_t>();
      e.inner_count = pj.at("inner_count").get<std::uint64_t>();
      e.edge_count = pj.at("edge_count").get<std::uint64_t>();
      e.bytes = pj.at("bytes").get<std::uint64_t>();
      e.checksum = pj.at("checksum").get<std::uint64_t>();
      m.partitions.push_back(e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw SetupError(std::string("malformed partition manifest: ") + ex.what());
  }
  return m;
}

}  // namespace weft

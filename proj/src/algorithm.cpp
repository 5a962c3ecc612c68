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

#include "weft/algorithm.hpp"

#include <mutex>

namespace weft {

namespace detail {
namespace {
std::map<std::string, AlgorithmInfo>& registry_storage() {
  static std::map<std::string, AlgorithmInfo> reg;
  return reg;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

void ensure_builtins() {
  static std::once_flag flag;
  std::call_once(flag, [] { register_builtin_algorithms(); });
}
}  // namespace

void add_algorithm(AlgorithmInfo info) {
  std::lock_guard lock(registry_mutex());
  std::string name = info.name;
  if (!registry_storage().emplace(name, std::move(info)).second)
    throw SetupError("algorithm already registered: " + name);
}
}  // namespace detail

void register_algorithm(AlgorithmInfo info) {
  detail::ensure_builtins();
  detail::add_algorithm(std::move(info));
}

const AlgorithmInfo& lookup_algorithm(const std::string& name) {
  detail::ensure_builtins();
  std::lock_guard lock(detail::registry_mutex());
  auto it = detail::registry_storage().find(name);
  if (it == detail::registry_storage().end()) throw SetupError("unknown algorithm: " + name);
  return it->second;
}

std::vector<std::string> algorithm_names() {
  detail::ensure_builtins();
  std::lock_guard lock(detail::registry_mutex());
  std::vector<std::string> names;
  for (const auto& [n, _] : detail::registry_storage()) names.push_back(n);
  return names;
}

}  // namespace weft

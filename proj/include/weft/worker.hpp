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

#include "weft/coordinator.hpp"
#include "weft/maas.hpp"
#include "weft/metrics.hpp"

namespace weft {

// Stateless compute task. Loops load -> compute -> writeback -> decrement ->
// poll until the finish flag is observed. Pinned mode keeps its partitions
// resident across supersteps; rotating mode claims and loads per superstep.
// On fatal errors the worker raises ctl/error/{id} before rethrowing so the
// coordinator can abort without waiting for the barrier timeout.
void worker_main(const JobConfig& config, const MaasTarget& target, MetricsRegistry* registry,
                 std::uint32_t worker_id);

}  // namespace weft

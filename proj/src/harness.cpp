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

#include "weft/harness.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "weft/partitioner.hpp"

namespace weft {

PartitionManifest prepare_job_input(const GlobalGraph& input, const std::string& algorithm,
                                    std::uint32_t partitions, MaasClient& maas) {
  const AlgorithmInfo& info = lookup_algorithm(algorithm);
  ViewKind view = info.required_view(input.directed());
  GlobalGraph view_graph = build_view(input, view);
  auto assignment = partition_by_degree(view_graph, partitions);
  return write_partitions(view_graph, assignment, view, maas);
}

bool values_match(const AlgorithmInfo& info, std::uint64_t engine_value,
                  std::uint64_t oracle_value) {
  if (!info.float_valued) return engine_value == oracle_value;
  double a = value_as_f64(engine_value);
  double b = value_as_f64(oracle_value);
  return std::abs(a - b) <= 1e-9 + 1e-6 * std::abs(b);
}

VerifyResult diff_results(const AlgorithmInfo& info, JobResult engine, SimulationResult oracle) {
  VerifyResult r;
  r.pass = true;
  for (vid_t g = 0; g < engine.values.size(); ++g) {
    if (!values_match(info, engine.values[g], oracle.values[g])) {
      r.pass = false;
      r.first_diff = VertexDiff{g, engine.values[g], oracle.values[g]};
      break;
    }
  }
  r.engine_supersteps = engine.supersteps;
  r.oracle_supersteps = oracle.supersteps;
  r.engine = std::move(engine);
  r.oracle = std::move(oracle);
  return r;
}

VerifyResult verify(const GlobalGraph& input, const JobConfig& config,
                    MetricsRegistry* registry) {
  const AlgorithmInfo& info = lookup_algorithm(config.algorithm);
  ViewKind view = info.required_view(input.directed());
  GlobalGraph view_graph = build_view(input, view);
  auto assignment = partition_by_degree(view_graph, config.partitions);

  MaasTarget target = open_maas(config.maas_uri);
  {
    auto client = target.make_client();
    write_partitions(view_graph, assignment, view, *client);
  }
  JobResult engine = run_job(config, target, registry);
  SimulationResult oracle = simulate(view_graph, assignment, config.partitions, info,
                                     config.params, config.max_supersteps);
  return diff_results(info, std::move(engine), std::move(oracle));
}

std::vector<BenchSpec> load_bench_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SetupError("cannot open bench matrix file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw SetupError(std::string("malformed bench matrix: ") + ex.what());
  }
  std::vector<BenchSpec> specs;
  for (const auto& e : j) {
    BenchSpec s;
    s.name = e.value("name", "run" + std::to_string(specs.size()));
    s.config = JobConfig::from_json(e.dump());
    if (e.contains("graph")) {
      const auto& g = e["graph"];
      s.edge_file = g.value("edge_file", std::string());
      s.directed = g.value("directed", false);
      s.weighted = g.value("weighted", false);
      s.n = g.value("n", 1000);
      s.avg_degree = g.value("avg_degree", 8.0);
      s.seed = g.value("seed", 1);
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

void run_bench(const std::vector<BenchSpec>& specs, std::ostream& report) {
  for (const auto& spec : specs) {
    GlobalGraph input;
    if (!spec.edge_file.empty()) {
      input = load_edge_list(spec.edge_file, spec.directed, spec.weighted).graph;
    } else {
      input = random_graph(spec.n, spec.avg_degree, spec.directed, spec.weighted, spec.seed);
    }
    JobConfig config = spec.config;
    if (config.maas_uri.empty()) config.maas_uri = "mem://";

    MaasTarget target = open_maas(config.maas_uri);
    {
      auto client = target.make_client();
      prepare_job_input(input, config.algorithm, config.partitions, *client);
    }
    MetricsRegistry registry(/*keep_events=*/false);
    JobResult result = run_job(config, target, &registry);

    std::uint64_t hash = fnv1a64(config.to_json());
    const RunReport& rep = result.report;
    report << spec.name << ' ' << std::hex << hash << std::dec << ' ' << config.algorithm << ' '
           << (config.mode() == ExecutionMode::Pinned ? "pinned" : "rotating") << ' '
           << config.partitions << ' ' << config.workers_launched() << ' ' << config.threads
           << ' ' << result.supersteps << ' ' << rep.wall_seconds << ' ' << rep.core_seconds
           << ' ' << rep.gb_seconds << ' ' << rep.ops_by_namespace.at("msg") << ' '
           << rep.msg_bytes_out << '\n';
  }
}

}  // namespace weft

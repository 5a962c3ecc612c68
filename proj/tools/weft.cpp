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

#include <unistd.h>

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "weft/codec.hpp"
#include "weft/harness.hpp"
#include "weft/partitioner.hpp"
#include "weft/worker.hpp"

namespace {

std::string self_exe_path() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return "weft";
  buf[n] = '\0';
  return buf;
}

weft::AlgorithmParams parse_params(const std::vector<std::string>& kvs) {
  weft::AlgorithmParams params;
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw weft::SetupError("--param expects key=value, got: " + kv);
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return params;
}

void write_result_file(const std::string& path, const weft::JobResult& result,
                       const std::vector<weft::vid_t>& external_ids) {
  std::ofstream out(path);
  if (!out) throw weft::SetupError("cannot write result file " + path);
  for (weft::vid_t g = 0; g < result.values.size(); ++g) {
    weft::vid_t id = external_ids.empty() ? g : external_ids[g];
    if (result.float_valued) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", weft::value_as_f64(result.values[g]));
      out << id << ' ' << buf << '\n';
    } else {
      out << id << ' ' << weft::value_as_i64(result.values[g]) << '\n';
    }
  }
}

int cmd_partition(const std::string& input, const std::string& vertex_file, std::uint32_t p,
                  bool directed, bool weighted, const std::string& view_str,
                  const std::string& out_uri) {
  auto view = weft::parse_view(view_str);
  if (!view) throw weft::SetupError("unknown view: " + view_str);

  std::optional<std::string> vfile;
  if (!vertex_file.empty()) vfile = vertex_file;
  weft::IngestedGraph ingested = weft::load_edge_list(input, directed, weighted, vfile);
  weft::GlobalGraph view_graph = weft::build_view(ingested.graph, *view);
  auto assignment = weft::partition_by_degree(view_graph, p);

  weft::MaasTarget target = weft::open_maas(out_uri);
  if (target.is_mem())
    throw weft::SetupError("mem:// stores do not outlive the process; use file://");
  auto client = target.make_client();
  weft::PartitionManifest manifest =
      weft::write_partitions(view_graph, assignment, *view, *client);
  client->put(weft::keys::idmap(),
              weft::encode_value_array(ingested.external_ids, 8));

  std::printf("partitioned %s: v=%" PRIu64 " p=%u view=%s\n", input.c_str(),
              manifest.vertex_count, manifest.num_partitions,
              weft::view_name(manifest.view).c_str());
  for (const auto& e : manifest.partitions)
    std::printf("  pid %u: inner=%" PRIu64 " edges=%" PRIu64 " bytes=%" PRIu64 "\n", e.pid,
                e.inner_count, e.edge_count, e.bytes);
  return 0;
}

int cmd_run(weft::JobConfig config, const std::string& out_path, const std::string& launch) {
  weft::MaasTarget target = weft::open_maas(config.maas_uri);
  std::unique_ptr<weft::WorkerLauncher> launcher;
  if (launch == "process") {
    if (target.is_mem())
      throw weft::SetupError("process launch requires a file:// store");
    launcher = weft::make_process_launcher(self_exe_path());
  } else if (launch == "thread") {
    launcher = weft::make_thread_launcher();
  } else {
    throw weft::SetupError("--launch must be thread or process");
  }

  weft::MetricsRegistry registry(/*keep_events=*/false);
  weft::JobResult result = weft::run_job(config, target, &registry, *launcher);

  std::vector<weft::vid_t> external_ids;
  {
    auto client = target.make_client();
    if (auto raw = client->get(weft::keys::idmap())) {
      std::size_t off = 0;
      external_ids = weft::decode_value_array(*raw, off, 8);
    }
  }
  write_result_file(out_path, result, external_ids);

  const auto& rep = result.report;
  std::printf("algorithm=%s mode=%s supersteps=%" PRId64 " wall=%.3fs core_s=%.3f gb_s=%.3f\n",
              config.algorithm.c_str(),
              config.mode() == weft::ExecutionMode::Pinned ? "pinned" : "rotating",
              result.supersteps, rep.wall_seconds, rep.core_seconds, rep.gb_seconds);
  std::printf("msg ops=%" PRIu64 " bytes_out=%" PRIu64 " results=%s\n",
              rep.ops_by_namespace.at("msg"), rep.msg_bytes_out, out_path.c_str());
  if (result.capped) std::printf("warning: superstep cap reached\n");
  return 0;
}

int cmd_verify(const weft::JobConfig& config, const std::string& input,
               const std::string& vertex_file, bool directed, bool weighted, weft::vid_t rand_n,
               double rand_degree, std::uint64_t seed) {
  weft::GlobalGraph graph;
  if (!input.empty()) {
    std::optional<std::string> vfile;
    if (!vertex_file.empty()) vfile = vertex_file;
    graph = weft::load_edge_list(input, directed, weighted, vfile).graph;
  } else {
    graph = weft::random_graph(rand_n, rand_degree, directed, weighted, seed);
  }

  weft::VerifyResult r = weft::verify(graph, config);
  if (r.pass) {
    std::printf("PASS %s: %" PRIu64 " vertices, engine %" PRId64
                " supersteps, oracle %" PRId64 "\n",
                config.algorithm.c_str(), static_cast<std::uint64_t>(r.engine.values.size()),
                r.engine_supersteps, r.oracle_supersteps);
    return 0;
  }
  const auto& d = *r.first_diff;
  const auto& info = weft::lookup_algorithm(config.algorithm);
  if (info.float_valued)
    std::fprintf(stderr, "FAIL at vertex %" PRIu64 ": engine=%.17g oracle=%.17g\n", d.vertex,
                 weft::value_as_f64(d.engine_value), weft::value_as_f64(d.oracle_value));
  else
    std::fprintf(stderr, "FAIL at vertex %" PRIu64 ": engine=%" PRId64 " oracle=%" PRId64 "\n",
                 d.vertex, weft::value_as_i64(d.engine_value),
                 weft::value_as_i64(d.oracle_value));
  return 1;
}

int cmd_bench(const std::string& matrix_path, const std::string& report_path) {
  auto specs = weft::load_bench_specs(matrix_path);
  std::ofstream report(report_path);
  if (!report) throw weft::SetupError("cannot write report file " + report_path);
  weft::run_bench(specs, report);
  std::printf("%zu runs -> %s\n", specs.size(), report_path.c_str());
  return 0;
}

int cmd_worker(const std::string& uri, std::uint32_t worker_id) {
  weft::MaasTarget target = weft::open_maas(uri);
  auto client = target.make_client();
  auto job = client->get_string(weft::keys::ctl_job());
  if (!job) throw weft::SetupError("no job config at ctl/job");
  weft::JobConfig config = weft::JobConfig::from_json(*job);
  weft::worker_main(config, target, nullptr, worker_id);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weft: subgraph-centric BSP graph processing over shared storage"};
  app.require_subcommand(1);

  // partition
  auto* partition = app.add_subcommand("partition", "build and upload binary partitions");
  std::string p_input, p_vertex, p_view = "as-is", p_out;
  std::uint32_t p_parts = 1;
  bool p_directed = false, p_weighted = false;
  partition->add_option("--input", p_input, "edge list file")->required();
  partition->add_option("--vertex-file", p_vertex, "optional vertex id file");
  partition->add_option("--partitions", p_parts, "partition count")->required();
  partition->add_flag("--directed", p_directed, "treat edges as directed");
  partition->add_flag("--weighted", p_weighted, "edges carry weights");
  partition->add_option("--view", p_view, "as-is | undirected | reverse | pagerank");
  partition->add_option("--out", p_out, "target store uri (file://<dir>)")->required();

  // shared run/verify options
  struct JobCli {
    weft::JobConfig cfg;
    std::vector<std::string> params;
    std::int64_t activation = -1;
    std::int64_t poll_us = 0;
    std::int64_t timeout_ms = 30000;

    void finalize() {
      cfg.params = parse_params(params);
      if (activation >= 0) cfg.activation_start = static_cast<std::uint32_t>(activation);
      cfg.poll_interval = std::chrono::microseconds(poll_us);
      cfg.barrier_timeout = std::chrono::milliseconds(timeout_ms);
    }
  };
  auto add_job_options = [](CLI::App* cmd, JobCli& job) {
    weft::JobConfig& cfg = job.cfg;
    cmd->add_option("--algorithm", cfg.algorithm, "registered algorithm name")->required();
    cmd->add_option("--partitions", cfg.partitions, "partition count")->required();
    cmd->add_option("--max-worker", cfg.max_worker, "maximum concurrent workers");
    cmd->add_option("--threads", cfg.threads, "threads per worker");
    cmd->add_option("--activation-start", job.activation,
                    "enable vertex activation from this superstep");
    cmd->add_flag_callback("--no-key-aggregation",
                           [&cfg] { cfg.key_aggregation = false; },
                           "per-vertex message keys instead of aggregated blocks");
    cmd->add_flag_callback("--no-colocation-dedup",
                           [&cfg] { cfg.colocation_dedup = false; },
                           "stage one entry per adjacent partition");
    cmd->add_flag_callback("--no-preload", [&cfg] { cfg.preload = false; },
                           "disable rotating-mode preloading");
    cmd->add_option("--param", job.params, "algorithm parameter key=value")->take_all();
    cmd->add_option("--mem-gb", cfg.memory_gb, "configured memory per worker (GB accounting)");
    cmd->add_option("--poll-us", job.poll_us, "poll interval microseconds");
    cmd->add_option("--timeout-ms", job.timeout_ms, "barrier timeout milliseconds");
    cmd->add_option("--max-supersteps", cfg.max_supersteps, "superstep safety cap");
    cmd->add_option("--compression", cfg.compression, "message compression codec");
  };

  // run
  auto* run = app.add_subcommand("run", "execute a job against uploaded partitions");
  JobCli run_job_cli;
  std::string run_out = "results.txt", run_launch = "thread";
  add_job_options(run, run_job_cli);
  run->add_option("--maas", run_job_cli.cfg.maas_uri, "store uri")->required();
  run->add_option("--out", run_out, "result file (global_id value per line)");
  run->add_option("--launch", run_launch, "thread | process");

  // verify
  auto* verify = app.add_subcommand("verify", "run engine and oracle, diff the results");
  JobCli verify_job_cli;
  std::string v_input, v_vertex;
  bool v_directed = false, v_weighted = false;
  std::uint64_t v_n = 1000, v_seed = 1;
  double v_degree = 8.0;
  add_job_options(verify, verify_job_cli);
  verify->add_option("--input", v_input, "edge list file (omit for a random graph)");
  verify->add_option("--vertex-file", v_vertex, "optional vertex id file");
  verify->add_flag("--directed", v_directed, "treat edges as directed");
  verify->add_flag("--weighted", v_weighted, "edges carry weights");
  verify->add_option("--random-n", v_n, "random graph vertex count");
  verify->add_option("--random-degree", v_degree, "random graph average degree");
  verify->add_option("--seed", v_seed, "random graph seed");

  // bench
  auto* bench = app.add_subcommand("bench", "run a config matrix and emit a report");
  std::string b_matrix, b_report = "bench-report.txt";
  bench->add_option("--matrix", b_matrix, "json config matrix file")->required();
  bench->add_option("--report", b_report, "output report path");

  // worker (internal; spawned by the process launcher)
  auto* worker = app.add_subcommand("worker", "worker process entry (internal)");
  std::string w_uri;
  std::uint32_t w_id = 0;
  worker->add_option("--maas", w_uri, "store uri")->required();
  worker->add_option("--worker-id", w_id, "worker index")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (partition->parsed())
      return cmd_partition(p_input, p_vertex, p_parts, p_directed, p_weighted, p_view, p_out);
    if (run->parsed()) {
      run_job_cli.finalize();
      return cmd_run(run_job_cli.cfg, run_out, run_launch);
    }
    if (verify->parsed()) {
      verify_job_cli.finalize();
      verify_job_cli.cfg.maas_uri = "mem://";
      return cmd_verify(verify_job_cli.cfg, v_input, v_vertex, v_directed, v_weighted, v_n,
                        v_degree, v_seed);
    }
    if (bench->parsed()) return cmd_bench(b_matrix, b_report);
    if (worker->parsed()) return cmd_worker(w_uri, w_id);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}

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

#include <unistd.h>

#include <array>
#include <atomic>
#include <filesystem>
#include <random>
#include <set>
#include <thread>

#include "weft/maas.hpp"

using namespace weft;

namespace {

MaasTarget temp_file_target(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::string dir = (std::filesystem::temp_directory_path() /
                     ("weft_maas_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1))))
                        .string();
  std::filesystem::remove_all(dir);
  return open_maas("file://" + dir);
}

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

void run_backend_suite(const MaasTarget& target) {
  auto maas = target.make_client();

  SUBCASE("put then get returns the exact bytes") {
    maas->put("part/0", bytes_of("hello"));
    auto got = maas->get("part/0");
    REQUIRE(got.has_value());
    CHECK(*got == bytes_of("hello"));
  }

  SUBCASE("get of an absent key is not-found, distinct from empty") {
    CHECK_FALSE(maas->get("part/absent").has_value());
    maas->put("part/empty", {});
    auto got = maas->get("part/empty");
    REQUIRE(got.has_value());
    CHECK(got->empty());
  }

  SUBCASE("delete removes, exists reflects state") {
    maas->put("result/1/2", bytes_of("x"));
    CHECK(maas->exists("result/1/2"));
    maas->del("result/1/2");
    CHECK_FALSE(maas->exists("result/1/2"));
  }

  SUBCASE("concurrent puts to distinct keys are all retrievable") {
    const int threads = 8, per_thread = 125;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        auto client = target.make_client();
        for (int i = 0; i < per_thread; ++i) {
          std::string key = "msg/0/" + std::to_string(t) + "/" + std::to_string(i);
          client->put(key, bytes_of(std::to_string(t * 1000 + i)));
        }
      });
    for (auto& th : pool) th.join();
    int found = 0;
    for (int t = 0; t < threads; ++t)
      for (int i = 0; i < per_thread; ++i)
        if (maas->exists("msg/0/" + std::to_string(t) + "/" + std::to_string(i))) ++found;
    CHECK(found == threads * per_thread);
  }

  SUBCASE("atomic_add: uninitialized is not-found, zero delta unchanged") {
    CHECK_THROWS_AS(maas->atomic_add("ctl/nope", 1), NotFoundError);
    maas->put_counter("ctl/c", 5);
    CHECK(maas->atomic_add("ctl/c", 0) == 5);
    for (int i = 0; i < 5; ++i) maas->atomic_add("ctl/c", -1);
    CHECK(*maas->read_counter("ctl/c") == 0);
  }

  SUBCASE("flags: unset, set, idempotent double set, clear") {
    CHECK_FALSE(maas->flag_set("ctl/f"));
    maas->set_flag("ctl/f");
    CHECK(maas->flag_set("ctl/f"));
    maas->set_flag("ctl/f");
    CHECK(maas->flag_set("ctl/f"));
    maas->clear_flag("ctl/f");
    CHECK_FALSE(maas->flag_set("ctl/f"));
  }

  SUBCASE("concurrent flag sets are observed") {
    std::vector<std::thread> pool;
    for (int t = 0; t < 2; ++t)
      pool.emplace_back([&] {
        auto client = target.make_client();
        client->set_flag("ctl/keep");
      });
    for (auto& th : pool) th.join();
    CHECK(maas->flag_set("ctl/keep"));
  }

  SUBCASE("claims hand out each partition exactly once") {
    maas->put_counter(keys::ctl_claim(0), 0);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 5; ++i) {
      auto pid = claim_next_partition(*maas, 0, 5);
      REQUIRE(pid.has_value());
      seen.insert(*pid);
    }
    CHECK(seen.size() == 5);
    CHECK_FALSE(claim_next_partition(*maas, 0, 5).has_value());
  }

  SUBCASE("8 concurrent claimers on p=5: 5 successes, 3 empty") {
    maas->put_counter(keys::ctl_claim(0), 0);
    std::atomic<int> successes{0}, empties{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t)
      pool.emplace_back([&] {
        auto client = target.make_client();
        if (claim_next_partition(*client, 0, 5))
          successes.fetch_add(1);
        else
          empties.fetch_add(1);
      });
    for (auto& th : pool) th.join();
    CHECK(successes.load() == 5);
    CHECK(empties.load() == 3);
  }
}

}  // namespace

TEST_CASE("mem backend contract") {
  MaasTarget target = open_maas("mem://");
  run_backend_suite(target);
}

TEST_CASE("file backend contract") {
  MaasTarget target = temp_file_target("contract");
  run_backend_suite(target);
  std::filesystem::remove_all(target.dir);
}

namespace {

// Randomized-interleaving atomicity checks shared by both backends. Each
// round initializes a counter to k, fires k concurrent decrements, and
// requires exactly one caller to observe zero.
void run_atomicity_rounds(const MaasTarget& target, int rounds) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < rounds; ++round) {
    auto maas = target.make_client();
    const int k = 5;
    maas->put_counter("ctl/unfinished", k);
    std::atomic<int> zero_observers{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < k; ++t)
      pool.emplace_back([&, t, round] {
        auto client = target.make_client();
        std::mt19937_64 trng(round * 100 + t);
        if (trng() % 2) std::this_thread::yield();
        if (client->atomic_add("ctl/unfinished", -1) == 0) zero_observers.fetch_add(1);
      });
    for (auto& th : pool) th.join();
    REQUIRE(zero_observers.load() == 1);

    // Exactly-once claims under the same interleavings.
    maas->put_counter(keys::ctl_claim(0), 0);
    const std::uint32_t p = 4;
    std::array<std::atomic<int>, 4> claimed{};
    std::vector<std::thread> claimers;
    for (int t = 0; t < 6; ++t)
      claimers.emplace_back([&, t, round] {
        auto client = target.make_client();
        std::mt19937_64 trng(round * 37 + t);
        if (trng() % 2) std::this_thread::yield();
        while (auto pid = claim_next_partition(*client, 0, p)) claimed[*pid].fetch_add(1);
      });
    for (auto& th : claimers) th.join();
    for (std::uint32_t i = 0; i < p; ++i) REQUIRE(claimed[i].load() == 1);
  }
}

}  // namespace

TEST_CASE("single-zero-observer and exactly-once claims: mem backend, 1000 rounds") {
  MaasTarget target = open_maas("mem://");
  run_atomicity_rounds(target, 1000);
}

TEST_CASE("single-zero-observer and exactly-once claims: file backend, 1000 rounds") {
  MaasTarget target = temp_file_target("atomic");
  run_atomicity_rounds(target, 1000);
  std::filesystem::remove_all(target.dir);
}

TEST_CASE("key namespace parsing") {
  CHECK(keys::namespace_of("part/3") == keys::Namespace::Part);
  CHECK(keys::namespace_of("msg/2/0/1") == keys::Namespace::Msg);
  CHECK(keys::namespace_of("result/final/0") == keys::Namespace::Result);
  CHECK(keys::namespace_of("ctl/superstep") == keys::Namespace::Ctl);
  CHECK(keys::namespace_of("weird") == keys::Namespace::Other);
  CHECK(*keys::msg_superstep("msg/12/0/3") == 12);
  CHECK(*keys::msg_superstep("msg/7/v/99") == 7);
  CHECK_FALSE(keys::msg_superstep("result/1/0").has_value());
}

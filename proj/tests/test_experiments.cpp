// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <atomic>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "mamimo/experiments.hpp"

using namespace mamimo;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = parse_config("{}");
  c.experiment.converge_paths = {4};
  c.experiment.converge_orders = {2, 4};
  c.experiment.min_bits = 4000;
  c.experiment.max_bits = 4000;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("5") == std::vector<std::uint64_t>{5});
  CHECK(parse_seed_list("0-3,7") == std::vector<std::uint64_t>{0, 1, 2, 3, 7});
  CHECK(parse_seed_list("2-2") == std::vector<std::uint64_t>{2});
  CHECK(parse_seed_list("0-199").size() == 200);
  for (const char* bad : {"", "a", "3-1", "1,,2", "-1", "1-"}) {
    CHECK_THROWS_AS(parse_seed_list(bad), InvalidParameter);
  }
}

TEST_CASE("seed derivation") {
  const SystemConfig sys;
  CHECK(channel_for_seed(sys, 4).prm() == channel_for_seed(sys, 4).prm());
  CHECK(channel_for_seed(sys, 4).aod() != channel_for_seed(sys, 5).aod());
  std::set<std::uint64_t> ids;
  for (const char* s : {"ma", "fpa", "gas"}) {
    for (double snr : {0.0, 2.0, 10.0}) ids.insert(ber_seed(1, s, snr));
  }
  CHECK(ids.size() == 9);
  CHECK(solver_seed(1) != solver_seed(2));
}

TEST_CASE("parallel_for covers every index and rethrows") {
  for (int workers : {1, 3, 16}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, workers, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, workers, [](int i) {
                      if (i == 7) throw InvalidParameter("boom");
                    }),
                    InvalidParameter);
  }
  parallel_for(0, 4, [](int) { FAIL("no work expected"); });
}

TEST_CASE("converge rows, determinism and worker independence") {
  ExperimentConfig c = small_config();
  const auto seeds = parse_seed_list("0-1");
  const auto run = run_converge(c, seeds);
  CHECK_FALSE(run.solver_failure);
  std::set<std::tuple<std::uint64_t, int, int>> traces;
  for (std::size_t i = 0; i < run.rows.size(); ++i) {
    const auto& r = run.rows[i];
    traces.insert({r.seed, r.paths, r.order});
    CHECK(r.wall_ms == 0.0);
    if (r.iteration > 0) {
      const auto& p = run.rows[i - 1];
      CHECK(p.iteration == r.iteration - 1);
      CHECK(r.eta >= p.eta - 1e-9 * p.eta);
    }
  }
  CHECK(traces.size() == 4);

  std::ostringstream a, b, d;
  write_converge_csv(a, c, seeds, run);
  write_converge_csv(b, c, seeds, run_converge(c, seeds));
  c.experiment.workers = 3;
  write_converge_csv(d, c, seeds, run_converge(c, seeds));
  CHECK(a.str() == b.str());
  CHECK(a.str() == d.str());
  CHECK(a.str().rfind("# mamimo converge\n# config_hash: ", 0) == 0);
  CHECK(a.str().find("# seeds: 0,1\nseed,L,M,iteration,eta,wall_ms\n") != std::string::npos);
}

TEST_CASE("BER sweeps agree across commands") {
  ExperimentConfig c = small_config();
  const auto seeds = parse_seed_list("3-4");
  const std::vector<std::string> schemes{"fpa", "gas"};
  const auto snr = run_ber_vs_snr(c, schemes, {10.0, 12.0}, seeds);
  REQUIRE(snr.points.size() == 4);
  CHECK(snr.points[0].scheme == "fpa");
  CHECK(snr.points[1].snr_db == 12.0);
  CHECK(snr.points[2].scheme == "gas");
  for (const auto& p : snr.points) {
    CHECK(p.channels == 2);
    CHECK(p.total_bits >= 2 * 4000);
    CHECK(p.mean_ber >= 0.0);
    CHECK(p.mean_ber <= 1.0);
  }
  const auto paths = run_ber_vs_paths(c, schemes, {c.system.paths}, 12.0, seeds);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].points[0].mean_ber == snr.points[1].mean_ber);
  CHECK(paths[0].points[1].mean_ber == snr.points[3].mean_ber);
  CHECK(paths[0].points[0].bit_errors == snr.points[1].bit_errors);

  std::ostringstream x, y;
  write_ber_snr_csv(x, c, seeds, snr);
  write_ber_snr_csv(y, c, seeds, run_ber_vs_snr(c, schemes, {10.0, 12.0}, seeds));
  CHECK(x.str() == y.str());
  CHECK(x.str().find("scheme,snr_db,ber,total_bits,channels") != std::string::npos);

  std::ostringstream z;
  write_ber_paths_csv(z, c, seeds, run_ber_vs_paths(c, schemes, {2, 4}, 12.0, seeds));
  CHECK(z.str().find("scheme,L,snr_db,ber") != std::string::npos);
  CHECK_THROWS_AS(run_ber_vs_snr(c, {"mimo"}, {10.0}, seeds), InvalidParameter);
}

TEST_CASE("iteration log line") {
  const auto j = nlohmann::json::parse(iteration_json({3, 1.5e-7, 12.5}));
  CHECK(j["n"] == 3);
  CHECK(j["eta"] == 1.5e-7);
  CHECK(j["wall_ms"] == 12.5);
}

TEST_CASE("single-run dump round trip") {
  const ExperimentConfig c = parse_config("{}");
  for (std::uint64_t seed : {0u, 9u}) {
    const std::string dump = single_run_json(c, seed);
    const DumpCheck chk = check_single_run_json(dump);
    CHECK(std::abs(chk.recomputed_dmin - chk.stored_dmin) <= 1e-12 * chk.stored_dmin);
    CHECK(chk.layout_feasible);
    CHECK(chk.power_feasible);
    CHECK(dump == single_run_json(c, seed));
  }
}

TEST_CASE("golden single run") {
  const std::string golden = read_file(std::string(MAMIMO_GOLDEN_DIR) + "/single_run_seed0.json");
  REQUIRE_FALSE(golden.empty());
  const auto want = nlohmann::json::parse(golden);
  const auto got = nlohmann::json::parse(single_run_json(load_config(std::string(MAMIMO_CONFIG_DIR) + "/default.json"), 0));
  CHECK(got["config"] == want["config"]);
  CHECK(got["channel"] == want["channel"]);
  CHECK(got["record"]["iterations"] == want["record"]["iterations"]);
  CHECK(got["record"]["termination"] == want["record"]["termination"]);
  auto close = [](const nlohmann::json& a, const nlohmann::json& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].get<double>() == doctest::Approx(b[i].get<double>()).epsilon(1e-8));
    }
  };
  close(got["result"]["u"], want["result"]["u"]);
  close(got["result"]["v"], want["result"]["v"]);
  close(got["record"]["history"]["eta"], want["record"]["history"]["eta"]);
  CHECK(got["result"]["d_min"].get<double>() ==
        doctest::Approx(want["result"]["d_min"].get<double>()).epsilon(1e-8));
}

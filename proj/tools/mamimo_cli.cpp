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


// mamimo command-line front end.
//
//   mamimo converge     --config c.json --seeds 0-19 --out converge.csv
//   mamimo ber-vs-snr   --schemes ma,fpa,gas --snr 0,2,4 --seeds 0-199
//   mamimo ber-vs-paths --paths 2,4,8,12 --snr 12
//   mamimo single-run   --seeds 7 --out dump.json
//
// Exit codes: 0 success, 2 configuration or usage error, 3 solver failure in
// at least one sweep point (results are still written), 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mamimo/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string seeds;
  std::string out;
  std::string log;
  int workers = 0;
};

// Writes to the named file, or stdout when empty.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (!file_) {
      std::cout.flush();
      return;
    }
    file_->close();
    if (!*file_) throw IoError("failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

mamimo::ExperimentConfig load(const Common& c) {
  mamimo::ExperimentConfig cfg = c.config.empty() ? mamimo::ExperimentConfig{} : mamimo::load_config(c.config);
  if (c.workers > 0) cfg.experiment.workers = c.workers;
  cfg.system.validate();
  return cfg;
}

std::vector<std::uint64_t> seeds_of(const Common& c, const char* fallback) {
  try {
    return mamimo::parse_seed_list(c.seeds.empty() ? fallback : c.seeds);
  } catch (const std::exception& e) {
    throw mamimo::ConfigError(std::string("--seeds: ") + e.what());
  }
}

void add_common(CLI::App* sub, Common& c, const char* seeds_help) {
  sub->add_option("--config", c.config, "JSON configuration file (defaults built in)");
  sub->add_option("--seeds", c.seeds, seeds_help);
  sub->add_option("--out", c.out, "output file (stdout if omitted)");
  sub->add_option("--workers", c.workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  sub->add_option("--log", c.log, "JSON-lines iteration log file");
}

void write_log(const std::string& path, const std::vector<nlohmann::json>& lines) {
  if (path.empty()) return;
  Sink sink(path);
  for (const auto& l : lines) sink.stream() << l.dump() << '\n';
  sink.close();
}

std::vector<nlohmann::json> sweep_log(const std::vector<std::string>& schemes,
                                      const std::vector<std::uint64_t>& seeds,
                                      const mamimo::BerSweep& sw, int paths) {
  std::vector<nlohmann::json> lines;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto& cell = sw.per_channel[s][i];
      lines.push_back({{"scheme", schemes[s]}, {"L", paths}, {"seed", seeds[i]},
                       {"n", cell.iterations}, {"eta", cell.d_min}, {"wall_ms", 0.0}});
    }
  }
  return lines;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial modulation with movable antennas: optimizer and BER experiments"};
  app.require_subcommand(1);

  Common conv_opts, snr_opts, paths_opts, single_opts;
  bool timing = false;
  std::vector<int> conv_paths;
  std::vector<std::string> snr_schemes, paths_schemes;
  std::vector<double> snr_list, paths_snr;
  std::vector<int> paths_list;

  auto* conv = app.add_subcommand("converge", "AO objective traces per (seed, L, M)");
  add_common(conv, conv_opts, "seed list, e.g. 0-19 (default 0-19)");
  conv->add_option("--paths", conv_paths, "path counts L")->delimiter(',');
  conv->add_flag("--timing", timing, "record wall-clock milliseconds (output no longer reproducible)");

  auto* snr = app.add_subcommand("ber-vs-snr", "average BER versus SNR");
  add_common(snr, snr_opts, "channel seeds (default 0-199)");
  snr->add_option("--schemes", snr_schemes, "subset of ma,fpa,gas,ma-tx,ma-rx")->delimiter(',');
  snr->add_option("--snr", snr_list, "SNR points in dB")->delimiter(',');

  auto* paths = app.add_subcommand("ber-vs-paths", "average BER versus the number of paths");
  add_common(paths, paths_opts, "channel seeds (default 0-199)");
  paths->add_option("--schemes", paths_schemes, "subset of ma,fpa,gas,ma-tx,ma-rx")->delimiter(',');
  paths->add_option("--paths", paths_list, "path counts L")->delimiter(',');
  paths->add_option("--snr", paths_snr, "SNR in dB")->expected(1);

  auto* single = app.add_subcommand("single-run", "full solve dump for one seed");
  add_common(single, single_opts, "one seed (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    bool failure = false;
    if (*conv) {
      auto cfg = load(conv_opts);
      if (!conv_paths.empty()) cfg.experiment.converge_paths = conv_paths;
      const auto seeds = seeds_of(conv_opts, "0-19");
      const auto run = mamimo::run_converge(cfg, seeds, timing);
      Sink sink(conv_opts.out);
      mamimo::write_converge_csv(sink.stream(), cfg, seeds, run);
      sink.close();
      std::vector<nlohmann::json> lines;
      for (const auto& r : run.rows) {
        lines.push_back({{"seed", r.seed}, {"L", r.paths}, {"M", r.order},
                         {"n", r.iteration}, {"eta", r.eta}, {"wall_ms", r.wall_ms}});
      }
      write_log(conv_opts.log, lines);
      failure = run.solver_failure;
    } else if (*snr) {
      auto cfg = load(snr_opts);
      if (!snr_schemes.empty()) cfg.experiment.schemes = snr_schemes;
      if (!snr_list.empty()) cfg.experiment.snr_db = snr_list;
      for (const auto& s : cfg.experiment.schemes) {
        if (!mamimo::is_known_scheme(s)) throw mamimo::ConfigError("--schemes: unknown scheme '" + s + "'");
      }
      const auto seeds = seeds_of(snr_opts, "0-199");
      const auto sw = mamimo::run_ber_vs_snr(cfg, cfg.experiment.schemes, cfg.experiment.snr_db, seeds);
      Sink sink(snr_opts.out);
      mamimo::write_ber_snr_csv(sink.stream(), cfg, seeds, sw);
      sink.close();
      write_log(snr_opts.log, sweep_log(cfg.experiment.schemes, seeds, sw, cfg.system.paths));
      failure = sw.solver_failure;
    } else if (*paths) {
      auto cfg = load(paths_opts);
      if (!paths_schemes.empty()) cfg.experiment.schemes = paths_schemes;
      if (!paths_list.empty()) cfg.experiment.paths_list = paths_list;
      if (!paths_snr.empty()) cfg.experiment.paths_snr_db = paths_snr.front();
      for (const auto& s : cfg.experiment.schemes) {
        if (!mamimo::is_known_scheme(s)) throw mamimo::ConfigError("--schemes: unknown scheme '" + s + "'");
      }
      for (int l : cfg.experiment.paths_list) {
        if (l < 1) throw mamimo::ConfigError("--paths: path counts must be positive");
      }
      const auto seeds = seeds_of(paths_opts, "0-199");
      const auto sweeps = mamimo::run_ber_vs_paths(cfg, cfg.experiment.schemes, cfg.experiment.paths_list,
                                                   cfg.experiment.paths_snr_db, seeds);
      Sink sink(paths_opts.out);
      mamimo::write_ber_paths_csv(sink.stream(), cfg, seeds, sweeps);
      sink.close();
      std::vector<nlohmann::json> lines;
      for (std::size_t k = 0; k < sweeps.size(); ++k) {
        auto part = sweep_log(cfg.experiment.schemes, seeds, sweeps[k], cfg.experiment.paths_list[k]);
        lines.insert(lines.end(), part.begin(), part.end());
        failure = failure || sweeps[k].solver_failure;
      }
      write_log(paths_opts.log, lines);
    } else if (*single) {
      const auto cfg = load(single_opts);
      const auto seeds = seeds_of(single_opts, "0");
      if (seeds.size() != 1) throw mamimo::ConfigError("--seeds: single-run takes exactly one seed");
      const std::string dump = mamimo::single_run_json(cfg, seeds.front());
      Sink sink(single_opts.out);
      sink.stream() << dump << '\n';
      sink.close();
      const auto doc = nlohmann::json::parse(dump);
      const auto& rec = doc.at("record");
      const auto& eta = rec.at("history").at("eta");
      std::vector<nlohmann::json> lines;
      for (std::size_t n = 0; n < eta.size(); ++n) {
        lines.push_back({{"seed", seeds.front()}, {"n", n}, {"eta", eta[n]}, {"wall_ms", 0.0}});
      }
      write_log(single_opts.log, lines);
      failure = rec.at("termination").get<std::string>() == "solver-failure";
    }
    if (failure) {
      std::cerr << "mamimo: solver failure in at least one sweep point\n";
      return kExitSolver;
    }
    return kExitOk;
  } catch (const mamimo::ConfigError& e) {
    std::cerr << "mamimo: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mamimo::InvalidParameter& e) {
    std::cerr << "mamimo: invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mamimo::SolverFailure& e) {
    std::cerr << "mamimo: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "mamimo: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "mamimo: " << e.what() << '\n';
    return kExitIo;
  }
}

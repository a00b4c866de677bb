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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mamimo/baselines.hpp"
#include "mamimo/ber.hpp"
#include "mamimo/config.hpp"

namespace mamimo {

/// "0-9", "1,5,7", "0-3,10" -> seed list in the given order.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Channel realization used for `seed` by every experiment, so sweeps with
/// matched seeds see identical channels.
ChannelRealization channel_for_seed(const SystemConfig& cfg, std::uint64_t seed);
std::uint64_t solver_seed(std::uint64_t seed);
std::uint64_t ber_seed(std::uint64_t seed, const std::string& scheme, double snr_db);

/// Runs `body(i)` for i in [0, count) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& body);

struct ConvergeRow {
  std::uint64_t seed = 0;
  int paths = 0;
  int order = 0;
  int iteration = 0;
  double eta = 0.0;
  double wall_ms = 0.0;
};

struct ConvergeRun {
  std::vector<ConvergeRow> rows;  // iteration 0 is the initial point
  bool solver_failure = false;
};

/// One AO trace per (seed, L, M) from the configured initialization.
/// wall_ms is reported only when `timing` is set (otherwise 0) so the
/// output stays a pure function of the configuration and seeds.
ConvergeRun run_converge(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                         bool timing = false);

/// Per-channel outcome of one scheme.
struct ChannelBer {
  double d_min = 0.0;
  int iterations = 0;          // AO iterations of the best start (0 for fpa, gas)
  std::vector<BerResult> ber;  // one per SNR point
  bool solver_failure = false;
};

struct BerPoint {
  std::string scheme;
  int paths = 0;
  double snr_db = 0.0;
  double mean_ber = 0.0;
  double std_err = 0.0;  // standard error of the mean over channels
  long long total_bits = 0;
  long long bit_errors = 0;
  int channels = 0;
  double mean_dmin = 0.0;
};

struct BerSweep {
  std::vector<BerPoint> points;  // scheme-major, then SNR, in the given orders
  // per_channel[scheme][seed index]
  std::vector<std::vector<ChannelBer>> per_channel;
  bool solver_failure = false;
};

BerSweep run_ber_vs_snr(const ExperimentConfig& cfg, const std::vector<std::string>& schemes,
                        const std::vector<double>& snr_db, const std::vector<std::uint64_t>& seeds);

/// One BerSweep per entry of `paths`, at a single SNR.
std::vector<BerSweep> run_ber_vs_paths(const ExperimentConfig& cfg,
                                       const std::vector<std::string>& schemes,
                                       const std::vector<int>& paths, double snr_db,
                                       const std::vector<std::uint64_t>& seeds);

void write_converge_csv(std::ostream& os, const ExperimentConfig& cfg,
                        const std::vector<std::uint64_t>& seeds, const ConvergeRun& run);
void write_ber_snr_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<std::uint64_t>& seeds, const BerSweep& sweep);
void write_ber_paths_csv(std::ostream& os, const ExperimentConfig& cfg,
                         const std::vector<std::uint64_t>& seeds,
                         const std::vector<BerSweep>& sweeps);

/// {"n": .., "eta": .., "wall_ms": ..}
std::string iteration_json(const IterationLog& log);

/// Full solve dump for one seed: configuration, channel, iterate histories,
/// final layout and precoder, d_min and the union bound.
std::string single_run_json(const ExperimentConfig& cfg, std::uint64_t seed);

struct DumpCheck {
  double stored_dmin = 0.0;
  double recomputed_dmin = 0.0;
  bool layout_feasible = false;
  bool power_feasible = false;
};

/// Rebuilds the channel, layout and precoder from a dump and re-evaluates d_min.
DumpCheck check_single_run_json(const std::string& dump);

}  // namespace mamimo

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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mamimo/beamforming.hpp"
#include "mamimo/channel.hpp"
#include "mamimo/codebook.hpp"
#include "mamimo/config.hpp"
#include "mamimo/metrics.hpp"

namespace mamimo {

enum class Termination { converged, max_iterations, solver_failure };

std::string to_string(Termination t);

struct IterationLog {
  int n = 0;
  double eta = 0.0;
  double wall_ms = 0.0;
};

/// Trace of one alternating-optimization run.
struct SolveRecord {
  int iterations = 0;
  std::vector<double> eta_history;  // entry 0 is the initial point
  std::vector<double> block_eta;    // d_min after every block update, entry 0 initial
  std::vector<CVector> w_history;
  std::vector<std::vector<double>> u_history;
  std::vector<std::vector<double>> v_history;
  std::vector<double> wall_ms;
  Termination termination = Termination::max_iterations;
  int solver_failures = 0;
  int start = 0;  // which multi-start produced this record
};

struct Initialization {
  Precoder w;
  AntennaLayout layout;
};

struct SolveResult {
  SolveRecord record;
  Precoder w;
  AntennaLayout layout;
  double d_min = 0.0;
};

/// `count` sorted positions in [0, region] with pairwise gaps >= spacing:
/// uniform draws, sorted, pushed apart left to right and then pulled back
/// inside the region right to left.
std::vector<double> random_positions(int count, double region, double spacing,
                                     std::mt19937_64& rng);

/// fpa: lambda/2 grid from 0 on both sides. random: uniform draws repaired to
/// the spacing constraint. Both use w = sqrt(P_T / T) * 1.
Initialization initialize(const SystemConfig& cfg, InitStrategy strategy, std::uint64_t seed = 0);

using IterationCallback = std::function<void(const IterationLog&)>;

/// Alternates the precoder SCA update with per-antenna BCD updates of u and
/// then v until the relative change of d_min drops below kappa.
SolveResult optimize(const SystemConfig& cfg, const ChannelRealization& ch,
                     const Initialization& init, const SolverOptions& opts,
                     const IterationCallback& on_iteration = {});

/// Runs opts.starts solves (the first from opts.init, the rest from random
/// layouts seeded from `seed`) and keeps the one with the largest d_min.
SolveResult optimize_multistart(const SystemConfig& cfg, const ChannelRealization& ch,
                                const SolverOptions& opts, std::uint64_t seed);

ScaOptions sca_options(const SolverOptions& opts);

}  // namespace mamimo

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
#include <string>
#include <vector>

#include "mamimo/optimizer.hpp"

namespace mamimo {

enum class Side { tx, rx };

struct SchemeResult {
  std::string scheme;
  Precoder w;
  AntennaLayout layout;
  double d_min = 0.0;
  SolveRecord record;  // populated by the AO-based schemes
  bool solver_failure = false;
};

/// lambda/2 grids on both sides, precoder from the SCA loop only.
SchemeResult fpa_scheme(const SystemConfig& cfg, const ChannelRealization& ch,
                        const SolverOptions& opts = {});

/// Candidate ports 0, step, 2 step, ... <= region.
std::vector<double> port_grid(double region, double step);

/// Greedy subset selection: `count` times, add the candidate index that
/// maximizes score(selected + candidate); lowest index wins ties. The
/// returned indices are sorted.
std::vector<int> greedy_select(int candidates, int count,
                               const std::function<double(const std::vector<int>&)>& score);

/// d_min of the spatial-modulation codebook restricted to the given channel
/// columns (one column per active transmit antenna) with a common precoder
/// weight. With a single symbol it degenerates to the column energy.
double partial_dmin(const CMatrix& h_cols, cdouble weight, const std::vector<cdouble>& points);

/// Greedy antenna selection over a port grid (transmit ports first with the
/// receive side on its lambda/2 grid, then receive ports), each candidate
/// scored by d_min at uniform full power, followed by one SCA precoder pass.
SchemeResult gas_scheme(const SystemConfig& cfg, const ChannelRealization& ch, double grid_step,
                        const SolverOptions& opts = {});

/// Alternating optimization with the other side frozen on its lambda/2 grid.
SchemeResult ma_one_side(const SystemConfig& cfg, const ChannelRealization& ch, Side side,
                         const SolverOptions& opts = {}, std::uint64_t seed = 0);

/// Full alternating optimization (both sides movable).
SchemeResult ma_scheme(const SystemConfig& cfg, const ChannelRealization& ch,
                       const SolverOptions& opts = {}, std::uint64_t seed = 0);

/// Dispatch by name: ma, fpa, gas, ma-tx, ma-rx. Unknown names throw
/// InvalidParameter.
SchemeResult run_scheme(const std::string& name, const SystemConfig& cfg,
                        const ChannelRealization& ch, const SolverOptions& opts,
                        std::uint64_t seed);

bool is_known_scheme(const std::string& name);

}  // namespace mamimo

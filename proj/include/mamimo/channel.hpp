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

#include <random>
#include <span>
#include <vector>

#include "mamimo/config.hpp"
#include "mamimo/types.hpp"

namespace mamimo {

/// Far-field geometry of one coherence block: departure angles, arrival
/// angles (radians, in [0, pi]) and the L_r x L_t path response matrix.
class ChannelRealization {
public:
  ChannelRealization() = default;
  ChannelRealization(std::vector<double> aod, std::vector<double> aoa, CMatrix prm);

  /// Sigma = diag(gains); requires aod.size() == aoa.size() == gains.size().
  static ChannelRealization diagonal(std::vector<double> aod, std::vector<double> aoa,
                                     const CVector& gains);

  const std::vector<double>& aod() const noexcept { return aod_; }
  const std::vector<double>& aoa() const noexcept { return aoa_; }
  const CMatrix& prm() const noexcept { return prm_; }
  int tx_paths() const noexcept { return static_cast<int>(aod_.size()); }
  int rx_paths() const noexcept { return static_cast<int>(aoa_.size()); }

private:
  std::vector<double> aod_;
  std::vector<double> aoa_;
  CMatrix prm_;
};

/// Transmit positions u and receive positions v, meters.
struct AntennaLayout {
  std::vector<double> u;
  std::vector<double> v;

  friend bool operator==(const AntennaLayout&, const AntennaLayout&) = default;
};

/// True when every position lies in [0, region] and all pairwise gaps are
/// at least `spacing` (evaluated as |a - b| >= spacing, no tolerance).
bool positions_feasible(std::span<const double> pos, double region, double spacing);
bool layout_feasible(const AntennaLayout& layout, const SystemConfig& cfg);

/// Smallest double y (searched within a few ulps of x + spacing) with
/// y - x >= spacing in floating point.
double spaced_after(double x, double spacing);
/// Largest double y (within a few ulps of x - spacing) with x - y >= spacing.
double spaced_before(double x, double spacing);

/// Uniform grid 0, D, 2D, ... with floating-point-exact spacing.
std::vector<double> uniform_positions(int count, double spacing);

CVector transmit_frv(double position, std::span<const double> aod, double wavelength);
CMatrix transmit_frm(std::span<const double> positions, std::span<const double> aod,
                     double wavelength);
CVector receive_frv(double position, std::span<const double> aoa, double wavelength);
CMatrix receive_frm(std::span<const double> positions, std::span<const double> aoa,
                    double wavelength);

/// H(u, v) = F(v)^H Sigma G(u), an R x T matrix.
CMatrix assemble_channel(const AntennaLayout& layout, const ChannelRealization& ch,
                         double wavelength);
CMatrix assemble_channel(const AntennaLayout& layout, const ChannelRealization& ch,
                         const SystemConfig& cfg);

/// Draws i.i.d. U[0, pi] angles and a diagonal Sigma with
/// sigma_l ~ CN(0, c^2 / L).
ChannelRealization sample_channel(const SystemConfig& cfg, std::mt19937_64& rng);

}  // namespace mamimo

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

#include "mamimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mamimo {

namespace {

void check_angles(std::span<const double> angles, const char* what) {
  for (double a : angles) {
    if (!(a >= 0.0 && a <= kPi)) {
      throw InvalidParameter(std::string(what) + " angle outside [0, pi]");
    }
  }
}

CVector frv(double position, std::span<const double> angles, double wavelength) {
  if (!(wavelength > 0.0)) throw InvalidParameter("wavelength must be positive");
  const double k = 2.0 * kPi / wavelength;
  CVector out(static_cast<Eigen::Index>(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = std::polar(1.0, k * position * std::cos(angles[i]));
  }
  return out;
}

CMatrix frm(std::span<const double> positions, std::span<const double> angles, double wavelength) {
  if (positions.empty()) throw InvalidParameter("empty position list");
  CMatrix out(static_cast<Eigen::Index>(angles.size()), static_cast<Eigen::Index>(positions.size()));
  for (std::size_t t = 0; t < positions.size(); ++t) {
    out.col(static_cast<Eigen::Index>(t)) = frv(positions[t], angles, wavelength);
  }
  return out;
}

}  // namespace

ChannelRealization::ChannelRealization(std::vector<double> aod, std::vector<double> aoa,
                                       CMatrix prm)
    : aod_(std::move(aod)), aoa_(std::move(aoa)), prm_(std::move(prm)) {
  if (aod_.empty() || aoa_.empty()) throw InvalidParameter("channel needs at least one path");
  check_angles(aod_, "departure");
  check_angles(aoa_, "arrival");
  if (prm_.rows() != static_cast<Eigen::Index>(aoa_.size()) ||
      prm_.cols() != static_cast<Eigen::Index>(aod_.size())) {
    throw InvalidParameter("path response matrix must be L_r x L_t");
  }
}

ChannelRealization ChannelRealization::diagonal(std::vector<double> aod, std::vector<double> aoa,
                                                const CVector& gains) {
  if (aod.size() != aoa.size() || static_cast<Eigen::Index>(aod.size()) != gains.size()) {
    throw InvalidParameter("diagonal path response needs L_t == L_r == gains");
  }
  CMatrix prm = gains.asDiagonal();
  return ChannelRealization(std::move(aod), std::move(aoa), std::move(prm));
}

bool positions_feasible(std::span<const double> pos, double region, double spacing) {
  for (std::size_t a = 0; a < pos.size(); ++a) {
    if (!(pos[a] >= 0.0 && pos[a] <= region)) return false;
    for (std::size_t b = a + 1; b < pos.size(); ++b) {
      if (!(std::abs(pos[a] - pos[b]) >= spacing)) return false;
    }
  }
  return true;
}

bool layout_feasible(const AntennaLayout& layout, const SystemConfig& cfg) {
  return static_cast<int>(layout.u.size()) == cfg.tx_antennas &&
         static_cast<int>(layout.v.size()) == cfg.rx_antennas &&
         positions_feasible(layout.u, cfg.tx_region, cfg.min_spacing) &&
         positions_feasible(layout.v, cfg.rx_region, cfg.min_spacing);
}

double spaced_after(double x, double spacing) {
  double y = x + spacing;
  constexpr double inf = std::numeric_limits<double>::infinity();
  while (!(y - x >= spacing)) y = std::nextafter(y, inf);
  // x + spacing may round up by a few ulps; walk back while the gap still holds
  for (int i = 0; i < 64 && std::nextafter(y, -inf) - x >= spacing; ++i) y = std::nextafter(y, -inf);
  return y;
}

double spaced_before(double x, double spacing) {
  double y = x - spacing;
  constexpr double inf = std::numeric_limits<double>::infinity();
  while (!(x - y >= spacing)) y = std::nextafter(y, -inf);
  for (int i = 0; i < 64 && x - std::nextafter(y, inf) >= spacing; ++i) y = std::nextafter(y, inf);
  return y;
}

std::vector<double> uniform_positions(int count, double spacing) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int t = 0; t < count; ++t) {
    double p = t * spacing;
    // t * D can land one ulp short of the required gap to the previous antenna
    if (t > 0) p = std::max(p, spaced_after(out.back(), spacing));
    out.push_back(p);
  }
  return out;
}

CVector transmit_frv(double position, std::span<const double> aod, double wavelength) {
  return frv(position, aod, wavelength);
}

CMatrix transmit_frm(std::span<const double> positions, std::span<const double> aod,
                     double wavelength) {
  return frm(positions, aod, wavelength);
}

CVector receive_frv(double position, std::span<const double> aoa, double wavelength) {
  return frv(position, aoa, wavelength);
}

CMatrix receive_frm(std::span<const double> positions, std::span<const double> aoa,
                    double wavelength) {
  return frm(positions, aoa, wavelength);
}

CMatrix assemble_channel(const AntennaLayout& layout, const ChannelRealization& ch,
                         double wavelength) {
  const CMatrix g = transmit_frm(layout.u, ch.aod(), wavelength);
  const CMatrix f = receive_frm(layout.v, ch.aoa(), wavelength);
  return f.adjoint() * ch.prm() * g;
}

CMatrix assemble_channel(const AntennaLayout& layout, const ChannelRealization& ch,
                         const SystemConfig& cfg) {
  return assemble_channel(layout, ch, cfg.wavelength);
}

ChannelRealization sample_channel(const SystemConfig& cfg, std::mt19937_64& rng) {
  const int paths = cfg.paths;
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::vector<double> aod(static_cast<std::size_t>(paths));
  std::vector<double> aoa(static_cast<std::size_t>(paths));
  for (auto& a : aod) a = angle(rng);
  for (auto& a : aoa) a = angle(rng);
  // each quadrature carries half of the per-path variance c^2 / L
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.path_gain() / paths / 2.0));
  CVector gains(paths);
  for (int l = 0; l < paths; ++l) {
    const double re = normal(rng);
    const double im = normal(rng);
    gains(l) = cdouble(re, im);
  }
  return ChannelRealization::diagonal(std::move(aod), std::move(aoa), gains);
}

}  // namespace mamimo

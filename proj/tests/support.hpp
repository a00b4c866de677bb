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


// Shared fixtures for the unit tests: seeded random channels, layouts and
// complex vectors, plus a few independent reference computations.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mamimo/channel.hpp"
#include "mamimo/codebook.hpp"
#include "mamimo/config.hpp"
#include "mamimo/optimizer.hpp"
#include "mamimo/types.hpp"

namespace testing {

using mamimo::cdouble;
using mamimo::CMatrix;
using mamimo::CVector;

inline cdouble cgauss(std::mt19937_64& rng, double var = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
  const double re = n(rng);
  return {re, n(rng)};
}

inline CVector random_cvector(std::mt19937_64& rng, int n, double var = 1.0) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cgauss(rng, var);
  return v;
}

inline CMatrix random_cmatrix(std::mt19937_64& rng, int rows, int cols, double var = 1.0) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = cgauss(rng, var);
  }
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Unit-scale channel so tolerances read naturally; angles U[0, pi].
inline mamimo::ChannelRealization random_channel(std::mt19937_64& rng, int paths) {
  std::vector<double> aod(paths), aoa(paths);
  for (auto& a : aod) a = uniform(rng, 0.0, mamimo::kPi);
  for (auto& a : aoa) a = uniform(rng, 0.0, mamimo::kPi);
  return mamimo::ChannelRealization::diagonal(aod, aoa, random_cvector(rng, paths, 1.0 / paths));
}

// Full (non-diagonal) path response matrix with distinct path counts.
inline mamimo::ChannelRealization random_full_channel(std::mt19937_64& rng, int lt, int lr) {
  std::vector<double> aod(lt), aoa(lr);
  for (auto& a : aod) a = uniform(rng, 0.0, mamimo::kPi);
  for (auto& a : aoa) a = uniform(rng, 0.0, mamimo::kPi);
  return mamimo::ChannelRealization(aod, aoa, random_cmatrix(rng, lr, lt, 1.0 / lt));
}

inline mamimo::AntennaLayout random_layout(std::mt19937_64& rng, const mamimo::SystemConfig& cfg) {
  return {mamimo::random_positions(cfg.tx_antennas, cfg.tx_region, cfg.min_spacing, rng),
          mamimo::random_positions(cfg.rx_antennas, cfg.rx_region, cfg.min_spacing, rng)};
}

inline CVector random_precoder(std::mt19937_64& rng, int t, double power) {
  CVector w = random_cvector(rng, t);
  return w * std::sqrt(power) / w.norm();
}

// ||F(v)^H Sigma G(u) c||^2 from the defining sums, no matrix helpers.
inline double direct_norm(const mamimo::AntennaLayout& layout, const mamimo::ChannelRealization& ch,
                          double wavelength, const CVector& c) {
  const double kappa = 2.0 * mamimo::kPi / wavelength;
  double total = 0.0;
  for (std::size_t r = 0; r < layout.v.size(); ++r) {
    cdouble acc = 0.0;
    for (std::size_t t = 0; t < layout.u.size(); ++t) {
      cdouble h = 0.0;
      for (int j = 0; j < ch.rx_paths(); ++j) {
        const cdouble f = std::polar(1.0, kappa * layout.v[r] * std::cos(ch.aoa()[j]));
        for (int i = 0; i < ch.tx_paths(); ++i) {
          const cdouble g = std::polar(1.0, kappa * layout.u[t] * std::cos(ch.aod()[i]));
          h += std::conj(f) * ch.prm()(j, i) * g;
        }
      }
      acc += h * c(static_cast<Eigen::Index>(t));
    }
    total += std::norm(acc);
  }
  return total;
}

inline double rel_err(double got, double want, double floor = 1e-300) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace testing

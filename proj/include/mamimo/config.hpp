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

#include <cmath>
#include <string>
#include <vector>

#include "mamimo/types.hpp"

namespace mamimo {

enum class Constellation { psk, qam };

/// Which power the SNR figure is referenced to.
///   transmit: SNR = P_T / sigma^2
///   receive:  SNR = P_T * c^2 / sigma^2, i.e. the average receive SNR after
///             large-scale path loss c^2 = C0 * d^-alpha.
enum class SnrReference { receive, transmit };

/// Physical link parameters. Lengths in meters, powers in linear units.
struct SystemConfig {
  int tx_antennas = 4;
  int rx_antennas = 4;
  int modulation_order = 4;
  double wavelength = 0.05;
  double min_spacing = 0.025;
  double tx_region = 0.4;
  double rx_region = 0.4;
  double tx_power = 1.0;
  double noise_power = 1e-3 * std::pow(40.0, -2.5) / 10.0;
  double distance = 40.0;
  double reference_gain = 1e-3;
  double pathloss_exponent = 2.5;
  int paths = 8;
  Constellation constellation = Constellation::psk;
  SnrReference snr_reference = SnrReference::receive;

  /// Large-scale power gain c^2 = C0 * d^-alpha.
  double path_gain() const { return reference_gain * std::pow(distance, -pathloss_exponent); }

  /// Noise power sigma^2 realizing `snr_db` under the configured reference.
  double noise_for_snr(double snr_db) const;

  /// Multiplier g such that sigma^2 = g * P_T / SNR_linear.
  double snr_gain_reference() const {
    return snr_reference == SnrReference::receive ? path_gain() : 1.0;
  }

  /// Throws InvalidParameter naming the offending field.
  void validate() const;
};

enum class InitStrategy { fpa, random };

/// Knobs of the alternating optimizer and its sub-solvers.
struct SolverOptions {
  double kappa = 1e-3;  // relative AO convergence threshold
  int max_iter = 50;
  double sca_tol = 1e-4;  // relative improvement threshold of the precoder SCA loop
  int sca_max_iter = 30;
  double inner_tol = 1e-8;  // inner max-min gap, relative to the subproblem scale
  double prune_factor = 10.0;
  int starts = 1;
  InitStrategy init = InitStrategy::fpa;
  bool strict_ordering = false;
  bool optimize_tx = true;
  bool optimize_rx = true;
  bool keep_history = true;
  double gas_grid_step = 0.0;  // 0 selects lambda/2
  int position_scan = 0;       // exact-d_min scan points per interval, 0 = surrogate only
};

/// Sweep parameters used by the command-line experiments.
struct ExperimentOptions {
  std::vector<int> converge_paths{4, 8, 12};
  std::vector<int> converge_orders{2, 4, 8};
  std::vector<std::string> schemes{"ma", "fpa", "gas", "ma-tx", "ma-rx"};
  std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12, 14};
  std::vector<int> paths_list{2, 4, 8, 12};
  double paths_snr_db = 12.0;
  long long min_bits = 100000;
  long long max_bits = 1000000;
  long long target_errors = 100;
  int workers = 1;
};

struct ExperimentConfig {
  SystemConfig system;
  SolverOptions solver;
  ExperimentOptions experiment;
};

/// Parses a JSON configuration. Unknown keys are rejected. Lengths accept
/// plain meters or {"value": x, "unit": "m" | "lambda"}, gains accept
/// {"value": x, "unit": "dB" | "linear"}. Throws ConfigError with line or
/// field diagnostics.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON rendering of a fully resolved configuration.
std::string config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 hash of the canonical rendering, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace mamimo

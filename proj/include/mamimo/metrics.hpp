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

#include <optional>
#include <vector>

#include "mamimo/codebook.hpp"
#include "mamimo/types.hpp"

namespace mamimo {

/// Diagonal precoder W = diag{w}.
struct Precoder {
  CVector weights;

  Precoder() = default;
  explicit Precoder(CVector w) : weights(std::move(w)) {}

  /// sqrt(P / T) on every antenna.
  static Precoder uniform(int tx_antennas, double power);

  double power() const { return weights.squaredNorm(); }
  bool feasible(double power_budget, double slack = 1e-9) const {
    return power() <= power_budget + slack;
  }
};

struct DistanceReport {
  double d_min = 0.0;
  int argmin_pair = -1;  // index into SmCodebook::pairs()
  std::optional<std::vector<double>> all_distances;
};

/// ||H diag{w} (x_i - x_j)||^2 for one pair.
double pair_distance(const CMatrix& h, const CVector& w, const DiffPair& pair);

/// Minimum over unordered pairs of ||H diag{w} (x_i - x_j)||^2. Ties go to
/// the lowest pair index.
DistanceReport min_distance(const CMatrix& h, const Precoder& w, const SmCodebook& cb,
                            bool keep_all = false);
double d_min(const CMatrix& h, const CVector& w, const SmCodebook& cb);

/// Standard Gaussian tail probability.
double q_function(double x);

/// iota * Q(sqrt(d_min / (2 sigma^2))). Not clamped to [0, 1].
double pep_upper_bound(double d_min, double sigma2, double iota);

}  // namespace mamimo

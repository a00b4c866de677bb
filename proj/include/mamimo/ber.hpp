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

#include "mamimo/codebook.hpp"
#include "mamimo/metrics.hpp"
#include "mamimo/types.hpp"

namespace mamimo {

struct BerResult {
  double snr_db = 0.0;
  long long trials = 0;
  long long bit_errors = 0;
  long long total_bits = 0;
  long long symbol_errors = 0;
  double ber = 0.0;
  double ser = 0.0;
  std::uint64_t seed = 0;
};

/// Exhaustive ML detector over a fixed noiseless receive constellation H W x.
class MlDetector {
public:
  MlDetector(const CMatrix& h, const CVector& w, const SmCodebook& cb);

  /// argmin_n ||y - H W x_n||^2, lowest index on ties.
  int detect(const CVector& y) const;
  const CMatrix& points() const noexcept { return points_; }

private:
  CMatrix points_;  // R x TM
};

int ml_detect(const CVector& y, const CMatrix& h, const Precoder& w, const SmCodebook& cb);

struct BerOptions {
  long long min_bits = 100000;
  long long max_bits = 1000000;
  long long target_errors = 100;
  double tx_power = 1.0;
  /// sigma^2 = gain_reference * tx_power / SNR_linear.
  double gain_reference = 1.0;
};

/// Monte Carlo BER of y = H W x + n, n ~ CN(0, sigma^2 I). Runs at least
/// min_bits, then stops at target_errors bit errors or max_bits, whichever
/// comes first. Deterministic in `seed`.
BerResult simulate_ber(const CMatrix& h, const Precoder& w, const SmCodebook& cb, double snr_db,
                       const BerOptions& opts, std::uint64_t seed);

}  // namespace mamimo

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

#include "mamimo/ber.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>

namespace mamimo {

MlDetector::MlDetector(const CMatrix& h, const CVector& w, const SmCodebook& cb) {
  if (h.cols() != cb.tx_antennas() || w.size() != cb.tx_antennas()) {
    throw InvalidParameter("channel, precoder and codebook dimensions disagree");
  }
  points_.resize(h.rows(), cb.size());
  for (int n = 0; n < cb.size(); ++n) {
    const SmSymbol& s = cb.symbol(n);
    points_.col(n) = h.col(s.antenna) * (w(s.antenna) * s.value);
  }
}

int MlDetector::detect(const CVector& y) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < points_.cols(); ++n) {
    double d = 0.0;
    for (Eigen::Index r = 0; r < points_.rows(); ++r) d += std::norm(y(r) - points_(r, n));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(n);
    }
  }
  return best;
}

int ml_detect(const CVector& y, const CMatrix& h, const Precoder& w, const SmCodebook& cb) {
  return MlDetector(h, w.weights, cb).detect(y);
}

BerResult simulate_ber(const CMatrix& h, const Precoder& w, const SmCodebook& cb, double snr_db,
                       const BerOptions& opts, std::uint64_t seed) {
  const int bps = cb.bits_per_symbol();
  if (opts.min_bits < bps) throw InvalidParameter("min_bits below one symbol");
  const MlDetector det(h, w.weights, cb);
  const double sigma2 = opts.gain_reference * opts.tx_power / std::pow(10.0, snr_db / 10.0);

  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_int_distribution<int> pick(0, cb.size() - 1);
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2 / 2.0));

  BerResult res;
  res.snr_db = snr_db;
  res.seed = seed;
  CVector y(h.rows());
  const long long max_bits = std::max(opts.max_bits, opts.min_bits);
  while (true) {
    if (res.total_bits >= opts.min_bits &&
        (res.bit_errors >= opts.target_errors || res.total_bits >= max_bits)) {
      break;
    }
    const int sent = pick(rng);
    for (Eigen::Index r = 0; r < y.size(); ++r) {
      const double re = noise(rng);
      const double im = noise(rng);
      y(r) = det.points()(r, sent) + cdouble(re, im);
    }
    const int got = det.detect(y);
    ++res.trials;
    res.total_bits += bps;
    if (got != sent) {
      ++res.symbol_errors;
      res.bit_errors += std::popcount(cb.label_of(sent) ^ cb.label_of(got));
    }
  }
  res.ber = static_cast<double>(res.bit_errors) / static_cast<double>(res.total_bits);
  res.ser = static_cast<double>(res.symbol_errors) / static_cast<double>(res.trials);
  return res;
}

}  // namespace mamimo

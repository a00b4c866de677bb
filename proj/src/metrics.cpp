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

#include "mamimo/metrics.hpp"

#include <cmath>
#include <limits>

namespace mamimo {

Precoder Precoder::uniform(int tx_antennas, double power) {
  return Precoder(CVector::Constant(tx_antennas, cdouble(std::sqrt(power / tx_antennas), 0.0)));
}

double pair_distance(const CMatrix& h, const CVector& w, const DiffPair& pair) {
  double acc = 0.0;
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    cdouble s(0.0, 0.0);
    for (int n = 0; n < pair.support_size; ++n) {
      const int t = pair.support[n];
      s += h(r, t) * w(t) * pair.coeff[n];
    }
    acc += std::norm(s);
  }
  return acc;
}

DistanceReport min_distance(const CMatrix& h, const Precoder& w, const SmCodebook& cb,
                            bool keep_all) {
  const auto& pairs = cb.pairs();
  if (pairs.empty()) throw InvalidParameter("codebook has fewer than two symbols");
  if (h.cols() != cb.tx_antennas() || w.weights.size() != cb.tx_antennas()) {
    throw InvalidParameter("channel, precoder and codebook dimensions disagree");
  }
  DistanceReport rep;
  rep.d_min = std::numeric_limits<double>::infinity();
  if (keep_all) rep.all_distances.emplace(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double d = pair_distance(h, w.weights, pairs[p]);
    if (keep_all) (*rep.all_distances)[p] = d;
    if (d < rep.d_min) {
      rep.d_min = d;
      rep.argmin_pair = static_cast<int>(p);
    }
  }
  return rep;
}

double d_min(const CMatrix& h, const CVector& w, const SmCodebook& cb) {
  return min_distance(h, Precoder(w), cb).d_min;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double pep_upper_bound(double d_min, double sigma2, double iota) {
  if (!(sigma2 > 0.0)) throw InvalidParameter("noise power must be positive");
  if (d_min < 0.0) throw InvalidParameter("d_min must be nonnegative");
  if (iota < 1.0) throw InvalidParameter("iota must be at least 1");
  return iota * q_function(std::sqrt(d_min / (2.0 * sigma2)));
}

}  // namespace mamimo

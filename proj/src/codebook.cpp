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

#include "mamimo/codebook.hpp"

#include <cmath>

namespace mamimo {

namespace {

void check_dims(int tx_antennas, int order) {
  if (!is_power_of_two(tx_antennas)) throw InvalidParameter("T must be a power of 2");
  if (!is_power_of_two(order)) throw InvalidParameter("M must be a power of 2");
}

}  // namespace

int bits_per_symbol(int tx_antennas, int order) {
  check_dims(tx_antennas, order);
  return log2_exact(tx_antennas) + log2_exact(order);
}

std::vector<cdouble> constellation_points(int order, Constellation constellation) {
  if (!is_power_of_two(order)) throw InvalidParameter("M must be a power of 2");
  std::vector<cdouble> pts(static_cast<std::size_t>(order));
  if (constellation == Constellation::psk || order <= 2) {
    for (int m = 0; m < order; ++m) pts[static_cast<std::size_t>(m)] = std::polar(1.0, 2.0 * kPi * m / order);
    return pts;
  }
  // square QAM: point index = row * side + col, levels +-1, +-3, ...
  const int bits = log2_exact(order);
  if (bits % 2 != 0) throw InvalidParameter("QAM needs an even number of bits per point");
  const int side = 1 << (bits / 2);
  const double energy = 2.0 * (side * side - 1) / 3.0;
  const double norm = 1.0 / std::sqrt(energy);
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      pts[static_cast<std::size_t>(row * side + col)] =
          cdouble((2 * col - side + 1) * norm, (2 * row - side + 1) * norm);
    }
  }
  return pts;
}

SmCodebook::SmCodebook(int tx_antennas, int order, Constellation constellation)
    : tx_antennas_(tx_antennas), order_(order), constellation_(constellation) {
  check_dims(tx_antennas, order);
  bits_ = log2_exact(tx_antennas) + log2_exact(order);
  const auto pts = constellation_points(order, constellation);
  const bool square_qam = constellation == Constellation::qam && order > 2;
  const int half_bits = log2_exact(order) / 2;
  const unsigned side = 1u << half_bits;

  for (int k = 0; k < tx_antennas; ++k) {
    for (int m = 0; m < order; ++m) {
      SmSymbol s;
      s.antenna = k;
      s.point = m;
      s.value = pts[static_cast<std::size_t>(m)];
      s.vector_form = CVector::Zero(tx_antennas);
      s.vector_form(k) = s.value;
      symbols_.push_back(std::move(s));

      unsigned point_label = 0;
      if (square_qam) {
        const unsigned row = static_cast<unsigned>(m) / side;
        const unsigned col = static_cast<unsigned>(m) % side;
        point_label = (gray_encode(row) << half_bits) | gray_encode(col);
      } else {
        point_label = gray_encode(static_cast<unsigned>(m));
      }
      labels_.push_back((static_cast<unsigned>(k) << log2_exact(order)) | point_label);
    }
  }
  index_by_label_.assign(symbols_.size(), -1);
  for (std::size_t n = 0; n < labels_.size(); ++n) index_by_label_[labels_[n]] = static_cast<int>(n);

  const int n = size();
  pairs_.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      DiffPair p;
      p.i = i;
      p.j = j;
      p.diff = symbols_[i].vector_form - symbols_[j].vector_form;
      for (int t = 0; t < tx_antennas; ++t) {
        if (p.diff(t) != cdouble(0.0, 0.0)) {
          p.support[p.support_size] = t;
          p.coeff[p.support_size] = p.diff(t);
          ++p.support_size;
        }
      }
      pairs_.push_back(std::move(p));
    }
  }
}

std::vector<int> SmCodebook::bits_of(int index) const {
  const unsigned label = label_of(index);
  std::vector<int> bits(static_cast<std::size_t>(bits_));
  for (int b = 0; b < bits_; ++b) bits[static_cast<std::size_t>(b)] = static_cast<int>((label >> (bits_ - 1 - b)) & 1u);
  return bits;
}

int SmCodebook::index_of_bits(const std::vector<int>& bits) const {
  if (static_cast<int>(bits.size()) != bits_) {
    throw InvalidParameter("bit vector length must equal log2 T + log2 M");
  }
  unsigned label = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw InvalidParameter("bits must be 0 or 1");
    label = (label << 1) | static_cast<unsigned>(b);
  }
  return index_by_label_[label];
}

SmCodebook build_codebook(int tx_antennas, int order, Constellation constellation) {
  return SmCodebook(tx_antennas, order, constellation);
}

std::vector<int> symbol_to_bits(const SmSymbol& sym, const SmCodebook& cb) {
  return cb.bits_of(cb.index_of(sym.antenna, sym.point));
}

const SmSymbol& bits_to_symbol(const std::vector<int>& bits, const SmCodebook& cb) {
  return cb.symbol(cb.index_of_bits(bits));
}

}  // namespace mamimo

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

#include <vector>

#include "mamimo/config.hpp"
#include "mamimo/types.hpp"

namespace mamimo {

/// One spatial-modulation symbol x = e_k * s_m. `antenna` and `point` are
/// zero-based (antenna k = 1 in the usual one-based notation is 0 here).
struct SmSymbol {
  int antenna = 0;
  int point = 0;
  cdouble value;
  CVector vector_form;
};

/// Unordered symbol pair i < j with its difference x_i - x_j. The difference
/// has at most two nonzero entries; they are also kept in sparse form.
struct DiffPair {
  int i = 0;
  int j = 0;
  CVector diff;
  int support_size = 0;
  int support[2] = {0, 0};
  cdouble coeff[2];

  /// Coefficient of antenna t in x_i - x_j.
  cdouble at(int t) const noexcept {
    for (int s = 0; s < support_size; ++s) {
      if (support[s] == t) return coeff[s];
    }
    return {0.0, 0.0};
  }
};

class SmCodebook {
public:
  SmCodebook(int tx_antennas, int order, Constellation constellation = Constellation::psk);

  int tx_antennas() const noexcept { return tx_antennas_; }
  int order() const noexcept { return order_; }
  Constellation constellation() const noexcept { return constellation_; }
  int size() const noexcept { return static_cast<int>(symbols_.size()); }
  int bits_per_symbol() const noexcept { return bits_; }

  const std::vector<SmSymbol>& symbols() const noexcept { return symbols_; }
  const std::vector<DiffPair>& pairs() const noexcept { return pairs_; }
  const SmSymbol& symbol(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }

  /// Symbol order is antenna-major, constellation-minor.
  int index_of(int antenna, int point) const noexcept { return antenna * order_ + point; }

  /// Bit label of symbol `index`: antenna index in natural binary (high
  /// bits) followed by the Gray label of the constellation point (low bits).
  std::vector<int> bits_of(int index) const;
  /// Packed form of bits_of, most significant bit first.
  unsigned label_of(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  int index_of_bits(const std::vector<int>& bits) const;

private:
  int tx_antennas_;
  int order_;
  Constellation constellation_;
  int bits_;
  std::vector<SmSymbol> symbols_;
  std::vector<DiffPair> pairs_;
  std::vector<unsigned> labels_;
  std::vector<int> index_by_label_;
};

SmCodebook build_codebook(int tx_antennas, int order,
                          Constellation constellation = Constellation::psk);

/// log2 T + log2 M.
int bits_per_symbol(int tx_antennas, int order);

std::vector<int> symbol_to_bits(const SmSymbol& sym, const SmCodebook& cb);
const SmSymbol& bits_to_symbol(const std::vector<int>& bits, const SmCodebook& cb);

/// Constellation points in index order, average unit energy.
std::vector<cdouble> constellation_points(int order, Constellation constellation);

constexpr unsigned gray_encode(unsigned n) noexcept { return n ^ (n >> 1); }
constexpr unsigned gray_decode(unsigned g) noexcept {
  unsigned n = g;
  for (unsigned s = g >> 1; s != 0; s >>= 1) n ^= s;
  return n;
}

}  // namespace mamimo

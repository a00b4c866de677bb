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

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "mamimo/channel.hpp"
#include "mamimo/codebook.hpp"
#include "mamimo/types.hpp"

namespace mamimo {

/// amp * cos(freq * x + phase)
struct TrigTerm {
  double amp = 0.0;
  double freq = 0.0;
  double phase = 0.0;
};

/// constant + sum of TrigTerms: the closed form of one pair distance as a
/// function of a single antenna coordinate.
struct TrigSeries {
  double constant = 0.0;
  std::vector<TrigTerm> terms;

  double value(double x) const;
  double grad(double x) const;
  double hess(double x) const;
  /// sum amp * freq^2 >= |hess(x)| for every x.
  double curvature_bound() const;
};

/// Pieces shared by every transmit-side expansion for a fixed (v, Sigma, u).
struct TxBasis {
  CMatrix b;    // F(v)^H Sigma, R x L_t
  CMatrix bhb;  // B^H B
  CMatrix g;    // G(u), L_t x T
  std::vector<double> aod;
  double wavenumber = 0.0;  // 2 pi / lambda
};

TxBasis make_tx_basis(const AntennaLayout& layout, const ChannelRealization& ch, double wavelength);

/// Pair distance as a function of transmit coordinate u_k:
///   y(u_k) = ||c_k B g(u_k) + Lambda||^2,  c = W (x_i - x_j),
///   Lambda = sum_{t != k} c_t B g(u_t).
/// The cosine terms carry the alpha_{ij} (path pairs i < j) and beta_{r,i}
/// (receive antenna r, path i) phases.
struct TxExpansion {
  int antenna = 0;
  int pair = -1;
  CVector c;
  cdouble c_k;
  CVector lambda;
  int alpha_terms = 0;  // series.terms[0, alpha_terms) are the alpha terms
  TrigSeries series;
};

TxExpansion build_tx_expansion(int k, int pair, const TxBasis& basis, const CVector& w,
                               const SmCodebook& cb);

/// Pieces shared by every receive-side expansion for a fixed (u, Sigma, v).
struct RxBasis {
  CMatrix sg;  // Sigma G(u), L_r x T
  CMatrix f;   // F(v), L_r x R
  std::vector<double> aoa;
  double wavenumber = 0.0;
};

RxBasis make_rx_basis(const AntennaLayout& layout, const ChannelRealization& ch, double wavelength);

/// Pair distance as a function of receive coordinate v_r. With
/// q = Sigma G(u) W (x_i - x_j) only |f(v_r)^H q|^2 depends on v_r; the other
/// rows contribute the constant `others`.
struct RxExpansion {
  int antenna = 0;
  int pair = -1;
  CVector q;
  double others = 0.0;
  TrigSeries series;
};

RxExpansion build_rx_expansion(int r, int pair, const RxBasis& basis, const CVector& w,
                               const SmCodebook& cb);

double y_value(double x, const TxExpansion& e);
double y_grad(double x, const TxExpansion& e);
double y_hess(double x, const TxExpansion& e);
double epsilon_bound(const TxExpansion& e);
double y_value(double x, const RxExpansion& e);
double y_grad(double x, const RxExpansion& e);
double y_hess(double x, const RxExpansion& e);
double epsilon_bound(const RxExpansion& e);

/// Concave quadratic minorant
///   y(x0) + y'(x0) (x - x0) - eps / 2 (x - x0)^2.
struct ScalarSurrogate {
  double point = 0.0;
  double value = 0.0;
  double slope = 0.0;
  double epsilon = 0.0;

  double operator()(double x) const {
    const double dx = x - point;
    return value + slope * dx - 0.5 * epsilon * dx * dx;
  }
};

ScalarSurrogate make_surrogate(const TrigSeries& series, double point);
double surrogate_lb(double x, const ScalarSurrogate& s);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// [0, region] minus (p_c - D, p_c + D) for every c != k, sorted and disjoint.
/// Endpoints are placed so that |x - p_c| >= D holds in floating point.
std::vector<Interval> feasible_intervals(int k, std::span<const double> positions, double region,
                                         double spacing);

/// Golden-section maximizer of a unimodal function on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol);

struct PositionStep {
  double position = 0.0;
  double eta = 0.0;  // min(floor, min_p surrogate_p(position))
};

/// Maximizes min(floor, min_p s_p(x)) over the union of intervals. The
/// objective is concave on each interval, so golden-section search per
/// interval to 1e-9 * region is exact to tolerance. Never returns a point
/// worse than the surrogates' shared expansion point when it is feasible.
PositionStep solve_position_subproblem(std::span<const ScalarSurrogate> surrogates,
                                       std::span<const Interval> intervals,
                                       double floor = std::numeric_limits<double>::infinity());

struct BlockUpdate {
  double old_position = 0.0;
  double new_position = 0.0;
  double eta_before = 0.0;
  double eta_after = 0.0;
  bool accepted = false;
};

/// One BCD step on transmit antenna k (`layout` updated in place). The move
/// is kept only if the recomputed d_min does not decrease. With
/// scan_points > 1 each feasible interval is also scanned at that many evenly
/// spaced positions under the exact d_min, and the better candidate wins.
BlockUpdate update_tx_position(int k, AntennaLayout& layout, const ChannelRealization& ch,
                               const CVector& w, const SmCodebook& cb, const SystemConfig& cfg,
                               int scan_points = 0);
BlockUpdate update_rx_position(int r, AntennaLayout& layout, const ChannelRealization& ch,
                               const CVector& w, const SmCodebook& cb, const SystemConfig& cfg,
                               int scan_points = 0);

}  // namespace mamimo

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

#include "mamimo/position.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mamimo/metrics.hpp"

namespace mamimo {

double TrigSeries::value(double x) const {
  double acc = constant;
  for (const auto& t : terms) acc += t.amp * std::cos(t.freq * x + t.phase);
  return acc;
}

double TrigSeries::grad(double x) const {
  double acc = 0.0;
  for (const auto& t : terms) acc -= t.amp * t.freq * std::sin(t.freq * x + t.phase);
  return acc;
}

double TrigSeries::hess(double x) const {
  double acc = 0.0;
  for (const auto& t : terms) acc -= t.amp * t.freq * t.freq * std::cos(t.freq * x + t.phase);
  return acc;
}

double TrigSeries::curvature_bound() const {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.amp * t.freq * t.freq;
  return acc;
}

TxBasis make_tx_basis(const AntennaLayout& layout, const ChannelRealization& ch, double wavelength) {
  TxBasis basis;
  basis.b = receive_frm(layout.v, ch.aoa(), wavelength).adjoint() * ch.prm();
  basis.bhb = basis.b.adjoint() * basis.b;
  basis.g = transmit_frm(layout.u, ch.aod(), wavelength);
  basis.aod = ch.aod();
  basis.wavenumber = 2.0 * kPi / wavelength;
  return basis;
}

TxExpansion build_tx_expansion(int k, int pair, const TxBasis& basis, const CVector& w,
                               const SmCodebook& cb) {
  const int n_tx = cb.tx_antennas();
  if (k < 0 || k >= n_tx) throw InvalidParameter("transmit antenna index out of range");
  const DiffPair& dp = cb.pairs().at(static_cast<std::size_t>(pair));

  TxExpansion e;
  e.antenna = k;
  e.pair = pair;
  e.c = w.cwiseProduct(dp.diff);
  e.c_k = e.c(k);

  CVector others = CVector::Zero(basis.g.rows());
  for (int t = 0; t < n_tx; ++t) {
    if (t != k && e.c(t) != cdouble(0.0, 0.0)) others += e.c(t) * basis.g.col(t);
  }
  e.lambda = basis.b * others;

  const double ck_abs = std::abs(e.c_k);
  const double ck_arg = std::arg(e.c_k);
  const auto paths = static_cast<Eigen::Index>(basis.aod.size());
  const double kw = basis.wavenumber;

  double diag = 0.0;
  for (Eigen::Index i = 0; i < paths; ++i) diag += basis.bhb(i, i).real();
  e.series.constant = ck_abs * ck_abs * diag + e.lambda.squaredNorm();
  if (ck_abs == 0.0) return e;

  for (Eigen::Index i = 0; i < paths; ++i) {
    for (Eigen::Index j = i + 1; j < paths; ++j) {
      const cdouble m = basis.bhb(i, j);
      const double amp = 2.0 * ck_abs * ck_abs * std::abs(m);
      if (amp == 0.0) continue;
      e.series.terms.push_back(
          {amp, kw * (std::cos(basis.aod[j]) - std::cos(basis.aod[i])), std::arg(m)});
    }
  }
  e.alpha_terms = static_cast<int>(e.series.terms.size());
  for (Eigen::Index r = 0; r < basis.b.rows(); ++r) {
    const double lam_abs = std::abs(e.lambda(r));
    if (lam_abs == 0.0) continue;
    const double lam_arg = std::arg(e.lambda(r));
    for (Eigen::Index i = 0; i < paths; ++i) {
      const cdouble br = basis.b(r, i);
      const double amp = 2.0 * ck_abs * std::abs(br) * lam_abs;
      if (amp == 0.0) continue;
      e.series.terms.push_back(
          {amp, -kw * std::cos(basis.aod[i]), -std::arg(br) - ck_arg + lam_arg});
    }
  }
  return e;
}

RxBasis make_rx_basis(const AntennaLayout& layout, const ChannelRealization& ch, double wavelength) {
  RxBasis basis;
  basis.sg = ch.prm() * transmit_frm(layout.u, ch.aod(), wavelength);
  basis.f = receive_frm(layout.v, ch.aoa(), wavelength);
  basis.aoa = ch.aoa();
  basis.wavenumber = 2.0 * kPi / wavelength;
  return basis;
}

RxExpansion build_rx_expansion(int r, int pair, const RxBasis& basis, const CVector& w,
                               const SmCodebook& cb) {
  if (r < 0 || r >= basis.f.cols()) throw InvalidParameter("receive antenna index out of range");
  const DiffPair& dp = cb.pairs().at(static_cast<std::size_t>(pair));

  RxExpansion e;
  e.antenna = r;
  e.pair = pair;
  e.q = basis.sg * w.cwiseProduct(dp.diff);
  for (Eigen::Index rr = 0; rr < basis.f.cols(); ++rr) {
    if (rr != r) e.others += std::norm(basis.f.col(rr).dot(e.q));
  }
  e.series.constant = e.q.squaredNorm() + e.others;
  const auto paths = e.q.size();
  const double kw = basis.wavenumber;
  for (Eigen::Index i = 0; i < paths; ++i) {
    for (Eigen::Index j = i + 1; j < paths; ++j) {
      const cdouble qq = e.q(i) * std::conj(e.q(j));
      const double amp = 2.0 * std::abs(qq);
      if (amp == 0.0) continue;
      e.series.terms.push_back(
          {amp, kw * (std::cos(basis.aoa[j]) - std::cos(basis.aoa[i])), std::arg(qq)});
    }
  }
  return e;
}

double y_value(double x, const TxExpansion& e) { return e.series.value(x); }
double y_grad(double x, const TxExpansion& e) { return e.series.grad(x); }
double y_hess(double x, const TxExpansion& e) { return e.series.hess(x); }
double epsilon_bound(const TxExpansion& e) { return e.series.curvature_bound(); }
double y_value(double x, const RxExpansion& e) { return e.series.value(x); }
double y_grad(double x, const RxExpansion& e) { return e.series.grad(x); }
double y_hess(double x, const RxExpansion& e) { return e.series.hess(x); }
double epsilon_bound(const RxExpansion& e) { return e.series.curvature_bound(); }

ScalarSurrogate make_surrogate(const TrigSeries& series, double point) {
  return {point, series.value(point), series.grad(point), series.curvature_bound()};
}

double surrogate_lb(double x, const ScalarSurrogate& s) { return s(x); }

std::vector<Interval> feasible_intervals(int k, std::span<const double> positions, double region,
                                         double spacing) {
  std::vector<Interval> out{{0.0, region}};
  std::vector<Interval> next;
  for (std::size_t c = 0; c < positions.size(); ++c) {
    if (static_cast<int>(c) == k) continue;
    const double cut_lo = spaced_before(positions[c], spacing);
    const double cut_hi = spaced_after(positions[c], spacing);
    next.clear();
    for (const auto& iv : out) {
      if (iv.lo <= std::min(iv.hi, cut_lo)) next.push_back({iv.lo, std::min(iv.hi, cut_lo)});
      if (std::max(iv.lo, cut_hi) <= iv.hi) next.push_back({std::max(iv.lo, cut_hi), iv.hi});
    }
    out.swap(next);
  }
  return out;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  return fc >= fd ? c : d;
}

PositionStep solve_position_subproblem(std::span<const ScalarSurrogate> surrogates,
                                       std::span<const Interval> intervals, double floor) {
  if (surrogates.empty()) throw InvalidParameter("no surrogates");
  if (intervals.empty()) throw InvalidParameter("no feasible interval");
  auto objective = [&](double x) {
    double v = floor;
    for (const auto& s : surrogates) v = std::min(v, s(x));
    return v;
  };
  const double tol = 1e-9 * std::max(intervals.back().hi, 1e-300);

  PositionStep best{surrogates.front().point, -std::numeric_limits<double>::infinity()};
  const bool anchor_ok = std::any_of(intervals.begin(), intervals.end(),
                                     [&](const Interval& iv) { return iv.contains(best.position); });
  if (anchor_ok) best.eta = objective(best.position);
  else best.position = intervals.front().lo;

  auto consider = [&](double x) {
    const double v = objective(x);
    if (v > best.eta) best = {x, v};
  };
  for (const auto& iv : intervals) {
    if (iv.hi > iv.lo) consider(golden_section_max(objective, iv.lo, iv.hi, tol));
    consider(iv.lo);
    consider(iv.hi);
  }
  return best;
}

namespace {

double pair_min(const CMatrix& h, const CVector& w, const SmCodebook& cb) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : cb.pairs()) lo = std::min(lo, pair_distance(h, w, p));
  return lo;
}

}  // namespace

namespace {

// Picks the best of the surrogate step and (optionally) an evenly spaced scan
// of each feasible interval under the true d_min, then keeps the move only if
// d_min does not decrease.
void settle_move(BlockUpdate& up, double& slot, double surrogate_step,
                 const std::vector<Interval>& intervals, int scan_points,
                 const std::function<double()>& objective) {
  double best_pos = up.old_position;
  double best_val = up.eta_before;
  auto try_at = [&](double x) {
    if (x == up.old_position) return;
    slot = x;
    const double val = objective();
    if (val > best_val) {
      best_val = val;
      best_pos = x;
    }
  };
  try_at(surrogate_step);
  if (scan_points > 1) {
    for (const auto& iv : intervals) {
      if (iv.hi == iv.lo) {
        try_at(iv.lo);
        continue;
      }
      for (int i = 0; i < scan_points; ++i) {
        try_at(iv.lo + (iv.hi - iv.lo) * i / (scan_points - 1));
      }
    }
  }
  slot = best_pos;
  if (best_pos != up.old_position) {
    up.new_position = best_pos;
    up.eta_after = best_val;
    up.accepted = true;
  }
}

// Re-evaluates an accepted move on the fully assembled channel.
void confirm_move(BlockUpdate& up, double& slot, const std::function<double()>& objective) {
  if (!up.accepted) return;
  const double after = objective();
  if (after >= up.eta_before) {
    up.eta_after = after;
    return;
  }
  slot = up.old_position;
  up.new_position = up.old_position;
  up.eta_after = up.eta_before;
  up.accepted = false;
}

}  // namespace

BlockUpdate update_tx_position(int k, AntennaLayout& layout, const ChannelRealization& ch,
                               const CVector& w, const SmCodebook& cb, const SystemConfig& cfg,
                               int scan_points) {
  BlockUpdate up;
  auto& slot = layout.u.at(static_cast<std::size_t>(k));
  up.old_position = up.new_position = slot;
  const CMatrix h = assemble_channel(layout, ch, cfg.wavelength);
  up.eta_before = up.eta_after = pair_min(h, w, cb);

  const TxBasis basis = make_tx_basis(layout, ch, cfg.wavelength);
  // pairs with c_k = 0 do not depend on u_k; they only enter the reported d_min
  std::vector<ScalarSurrogate> surrogates;
  for (std::size_t p = 0; p < cb.pairs().size(); ++p) {
    const auto& dp = cb.pairs()[p];
    if (w(k) * dp.diff(k) == cdouble(0.0, 0.0)) continue;
    const TxExpansion e = build_tx_expansion(k, static_cast<int>(p), basis, w, cb);
    surrogates.push_back(make_surrogate(e.series, up.old_position));
  }
  if (surrogates.empty()) return up;

  const auto intervals = feasible_intervals(k, layout.u, cfg.tx_region, cfg.min_spacing);
  const PositionStep step = solve_position_subproblem(surrogates, intervals);

  // only column k moves
  CMatrix h_try = h;
  settle_move(up, slot, step.position, intervals, scan_points, [&] {
    const CVector g = transmit_frv(slot, ch.aod(), cfg.wavelength);
    h_try.col(k) = basis.b * g;
    return pair_min(h_try, w, cb);
  });
  confirm_move(up, slot, [&] { return pair_min(assemble_channel(layout, ch, cfg.wavelength), w, cb); });
  return up;
}

BlockUpdate update_rx_position(int r, AntennaLayout& layout, const ChannelRealization& ch,
                               const CVector& w, const SmCodebook& cb, const SystemConfig& cfg,
                               int scan_points) {
  BlockUpdate up;
  auto& slot = layout.v.at(static_cast<std::size_t>(r));
  up.old_position = up.new_position = slot;
  const CMatrix h = assemble_channel(layout, ch, cfg.wavelength);
  up.eta_before = up.eta_after = pair_min(h, w, cb);

  const RxBasis basis = make_rx_basis(layout, ch, cfg.wavelength);
  std::vector<ScalarSurrogate> surrogates;
  surrogates.reserve(cb.pairs().size());
  for (std::size_t p = 0; p < cb.pairs().size(); ++p) {
    const RxExpansion e = build_rx_expansion(r, static_cast<int>(p), basis, w, cb);
    if (e.series.terms.empty()) continue;
    surrogates.push_back(make_surrogate(e.series, up.old_position));
  }
  if (surrogates.empty()) return up;

  const auto intervals = feasible_intervals(r, layout.v, cfg.rx_region, cfg.min_spacing);
  const PositionStep step = solve_position_subproblem(surrogates, intervals);

  // only row r moves
  CMatrix h_try = h;
  settle_move(up, slot, step.position, intervals, scan_points, [&] {
    const CVector f = receive_frv(slot, ch.aoa(), cfg.wavelength);
    h_try.row(r) = f.adjoint() * basis.sg;
    return pair_min(h_try, w, cb);
  });
  confirm_move(up, slot, [&] { return pair_min(assemble_channel(layout, ch, cfg.wavelength), w, cb); });
  return up;
}

}  // namespace mamimo

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

#include "mamimo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mamimo {

namespace {

CVector precoder_pass(const CMatrix& h, const SmCodebook& cb, const SystemConfig& cfg,
                      const SolverOptions& opts, bool& failed) {
  const Precoder w0 = Precoder::uniform(cfg.tx_antennas, cfg.tx_power);
  try {
    return sca_beamforming(h, cb, w0.weights, cfg.tx_power, sca_options(opts)).w;
  } catch (const SolverFailure& e) {
    failed = true;
    return e.best();
  }
}

SchemeResult from_solve(std::string name, SolveResult&& r) {
  SchemeResult out;
  out.scheme = std::move(name);
  out.w = std::move(r.w);
  out.layout = std::move(r.layout);
  out.d_min = r.d_min;
  out.solver_failure = r.record.termination == Termination::solver_failure;
  out.record = std::move(r.record);
  return out;
}

}  // namespace

SchemeResult fpa_scheme(const SystemConfig& cfg, const ChannelRealization& ch,
                        const SolverOptions& opts) {
  const Initialization init = initialize(cfg, InitStrategy::fpa);
  const SmCodebook cb(cfg.tx_antennas, cfg.modulation_order, cfg.constellation);
  SchemeResult out;
  out.scheme = "fpa";
  out.layout = init.layout;
  const CMatrix h = assemble_channel(out.layout, ch, cfg.wavelength);
  out.w = Precoder(precoder_pass(h, cb, cfg, opts, out.solver_failure));
  out.d_min = d_min(h, out.w.weights, cb);
  return out;
}

std::vector<double> port_grid(double region, double step) {
  if (!(step > 0.0)) throw InvalidParameter("grid step must be positive");
  // count with a little slack so A = n * step keeps its end port when rounding allows
  const auto count = static_cast<int>(std::floor(region / step * (1.0 + 1e-12))) + 1;
  for (int n = count; n > 1; --n) {
    std::vector<double> ports(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ports[static_cast<std::size_t>(i)] = i * step;
    for (std::size_t i = 1; i < ports.size(); ++i) ports[i] = std::max(ports[i], spaced_after(ports[i - 1], step));
    if (ports.back() > region) {
      ports.back() = region;
      for (std::size_t i = ports.size() - 1; i-- > 0;) ports[i] = std::min(ports[i], spaced_before(ports[i + 1], step));
    }
    if (positions_feasible(ports, region, step)) return ports;
  }
  return {0.0};
}

std::vector<int> greedy_select(int candidates, int count,
                               const std::function<double(const std::vector<int>&)>& score) {
  if (count > candidates) throw InvalidParameter("fewer ports than antennas");
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(candidates), false);
  for (int step = 0; step < count; ++step) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < candidates; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      std::vector<int> trial = chosen;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
      const double s = score(trial);
      if (best < 0 || s > best_score) {
        best = c;
        best_score = s;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best), best);
  }
  return chosen;
}

double partial_dmin(const CMatrix& h_cols, cdouble weight, const std::vector<cdouble>& points) {
  const auto n_ant = h_cols.cols();
  const auto n_pts = static_cast<Eigen::Index>(points.size());
  if (n_ant * n_pts < 2) return std::norm(weight) * h_cols.squaredNorm();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < n_ant; ++a) {
    for (Eigen::Index m = 0; m < n_pts; ++m) {
      for (Eigen::Index b = a; b < n_ant; ++b) {
        for (Eigen::Index n = (b == a ? m + 1 : 0); n < n_pts; ++n) {
          const CVector d = weight * (h_cols.col(a) * points[static_cast<std::size_t>(m)] -
                                      h_cols.col(b) * points[static_cast<std::size_t>(n)]);
          best = std::min(best, d.squaredNorm());
        }
      }
    }
  }
  return best;
}

SchemeResult gas_scheme(const SystemConfig& cfg, const ChannelRealization& ch, double grid_step,
                        const SolverOptions& opts) {
  cfg.validate();
  if (grid_step <= 0.0) grid_step = cfg.wavelength / 2.0;
  if (grid_step < cfg.min_spacing) throw InvalidParameter("grid step below the minimum spacing");
  const auto tx_ports = port_grid(cfg.tx_region, grid_step);
  const auto rx_ports = port_grid(cfg.rx_region, grid_step);
  if (static_cast<int>(tx_ports.size()) < cfg.tx_antennas ||
      static_cast<int>(rx_ports.size()) < cfg.rx_antennas) {
    throw InvalidParameter("fewer ports than antennas");
  }

  const SmCodebook cb(cfg.tx_antennas, cfg.modulation_order, cfg.constellation);
  const auto points = constellation_points(cfg.modulation_order, cfg.constellation);
  const cdouble weight(std::sqrt(cfg.tx_power / cfg.tx_antennas), 0.0);
  // transmit ports first, seen through the whole receive port grid
  const CMatrix b = receive_frm(rx_ports, ch.aoa(), cfg.wavelength).adjoint() * ch.prm();
  const CMatrix port_cols = b * transmit_frm(tx_ports, ch.aod(), cfg.wavelength);
  auto tx_score = [&](const std::vector<int>& sel) {
    CMatrix cols(port_cols.rows(), static_cast<Eigen::Index>(sel.size()));
    for (std::size_t i = 0; i < sel.size(); ++i) {
      cols.col(static_cast<Eigen::Index>(i)) = port_cols.col(sel[i]);
    }
    return partial_dmin(cols, weight, points);
  };
  const auto tx_sel = greedy_select(static_cast<int>(tx_ports.size()), cfg.tx_antennas, tx_score);
  SchemeResult out;
  out.scheme = "gas";
  for (int i : tx_sel) out.layout.u.push_back(tx_ports[static_cast<std::size_t>(i)]);

  // receive ports with the chosen transmit ports
  const CMatrix sg = ch.prm() * transmit_frm(out.layout.u, ch.aod(), cfg.wavelength);
  const CMatrix port_rows = receive_frm(rx_ports, ch.aoa(), cfg.wavelength).adjoint() * sg;
  const CVector w_uniform = CVector::Constant(cfg.tx_antennas, weight);
  auto rx_score = [&](const std::vector<int>& sel) {
    CMatrix rows(static_cast<Eigen::Index>(sel.size()), port_rows.cols());
    for (std::size_t i = 0; i < sel.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = port_rows.row(sel[i]);
    }
    return d_min(rows, w_uniform, cb);
  };
  const auto rx_sel = greedy_select(static_cast<int>(rx_ports.size()), cfg.rx_antennas, rx_score);
  for (int i : rx_sel) out.layout.v.push_back(rx_ports[static_cast<std::size_t>(i)]);

  const CMatrix h = assemble_channel(out.layout, ch, cfg.wavelength);
  out.w = Precoder(precoder_pass(h, cb, cfg, opts, out.solver_failure));
  out.d_min = d_min(h, out.w.weights, cb);
  return out;
}

SchemeResult ma_one_side(const SystemConfig& cfg, const ChannelRealization& ch, Side side,
                         const SolverOptions& opts, std::uint64_t seed) {
  SolverOptions o = opts;
  o.optimize_tx = side == Side::tx;
  o.optimize_rx = side == Side::rx;
  return from_solve(side == Side::tx ? "ma-tx" : "ma-rx", optimize_multistart(cfg, ch, o, seed));
}

SchemeResult ma_scheme(const SystemConfig& cfg, const ChannelRealization& ch,
                       const SolverOptions& opts, std::uint64_t seed) {
  SolverOptions o = opts;
  o.optimize_tx = true;
  o.optimize_rx = true;
  return from_solve("ma", optimize_multistart(cfg, ch, o, seed));
}

bool is_known_scheme(const std::string& name) {
  return name == "ma" || name == "fpa" || name == "gas" || name == "ma-tx" || name == "ma-rx";
}

SchemeResult run_scheme(const std::string& name, const SystemConfig& cfg,
                        const ChannelRealization& ch, const SolverOptions& opts,
                        std::uint64_t seed) {
  if (name == "ma") return ma_scheme(cfg, ch, opts, seed);
  if (name == "fpa") return fpa_scheme(cfg, ch, opts);
  if (name == "gas") return gas_scheme(cfg, ch, opts.gas_grid_step, opts);
  if (name == "ma-tx") return ma_one_side(cfg, ch, Side::tx, opts, seed);
  if (name == "ma-rx") return ma_one_side(cfg, ch, Side::rx, opts, seed);
  throw InvalidParameter("unknown scheme '" + name + "'");
}

}  // namespace mamimo

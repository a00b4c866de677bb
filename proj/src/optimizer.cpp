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

#include "mamimo/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mamimo/position.hpp"

namespace mamimo {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max-iterations";
    case Termination::solver_failure: return "solver-failure";
  }
  return "unknown";
}

ScaOptions sca_options(const SolverOptions& opts) {
  ScaOptions s;
  s.tol_outer = opts.sca_tol;
  s.max_iter = opts.sca_max_iter;
  s.inner_tol = opts.inner_tol;
  s.prune_factor = opts.prune_factor;
  return s;
}

std::vector<double> random_positions(int count, double region, double spacing,
                                     std::mt19937_64& rng) {
  if (count > 1 && region < (count - 1) * spacing) {
    throw InvalidParameter("movement region too small for the antenna count");
  }
  std::uniform_real_distribution<double> uni(0.0, region);
  std::vector<double> p(static_cast<std::size_t>(count));
  for (auto& x : p) x = uni(rng);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 1; i < p.size(); ++i) p[i] = std::max(p[i], spaced_after(p[i - 1], spacing));
  if (!p.empty() && p.back() > region) {
    p.back() = region;
    for (std::size_t i = p.size() - 1; i-- > 0;) p[i] = std::min(p[i], spaced_before(p[i + 1], spacing));
  }
  if (!positions_feasible(p, region, spacing)) {
    // (T-1) D fits only up to rounding; fall back to the packed grid
    p = uniform_positions(count, spacing);
    if (!positions_feasible(p, region, spacing)) {
      throw InvalidParameter("movement region too small for the antenna count");
    }
  }
  return p;
}

Initialization initialize(const SystemConfig& cfg, InitStrategy strategy, std::uint64_t seed) {
  cfg.validate();
  Initialization init;
  init.w = Precoder::uniform(cfg.tx_antennas, cfg.tx_power);
  if (strategy == InitStrategy::fpa) {
    const double half = cfg.wavelength / 2.0;
    init.layout.u = uniform_positions(cfg.tx_antennas, std::max(half, cfg.min_spacing));
    init.layout.v = uniform_positions(cfg.rx_antennas, std::max(half, cfg.min_spacing));
  } else {
    std::mt19937_64 rng(mix_seed(seed));
    init.layout.u = random_positions(cfg.tx_antennas, cfg.tx_region, cfg.min_spacing, rng);
    init.layout.v = random_positions(cfg.rx_antennas, cfg.rx_region, cfg.min_spacing, rng);
  }
  if (!layout_feasible(init.layout, cfg)) {
    throw InvalidParameter("initial layout does not fit the movement regions");
  }
  return init;
}

SolveResult optimize(const SystemConfig& cfg, const ChannelRealization& ch,
                     const Initialization& init, const SolverOptions& opts,
                     const IterationCallback& on_iteration) {
  cfg.validate();
  if (!layout_feasible(init.layout, cfg)) throw InvalidParameter("initial layout infeasible");
  if (!init.w.feasible(cfg.tx_power)) throw InvalidParameter("initial precoder infeasible");

  const SmCodebook cb(cfg.tx_antennas, cfg.modulation_order, cfg.constellation);
  const ScaOptions sca = sca_options(opts);

  SolveResult res;
  res.w = init.w;
  res.layout = init.layout;
  SolveRecord& rec = res.record;

  auto current_dmin = [&](const CVector& w) {
    return d_min(assemble_channel(res.layout, ch, cfg.wavelength), w, cb);
  };
  auto snapshot = [&] {
    if (!opts.keep_history) return;
    rec.w_history.push_back(res.w.weights);
    rec.u_history.push_back(res.layout.u);
    rec.v_history.push_back(res.layout.v);
  };

  double eta = current_dmin(res.w.weights);
  rec.eta_history.push_back(eta);
  rec.block_eta.push_back(eta);
  snapshot();

  using clock = std::chrono::steady_clock;
  bool failed = false;
  for (int n = 0; n < opts.max_iter; ++n) {
    const auto t0 = clock::now();
    const CVector w_prev = res.w.weights;

    try {
      const CMatrix h = assemble_channel(res.layout, ch, cfg.wavelength);
      const ScaResult s = sca_beamforming(h, cb, res.w.weights, cfg.tx_power, sca);
      res.w.weights = s.w;
    } catch (const SolverFailure& e) {
      ++rec.solver_failures;
      failed = true;
      res.w.weights = e.best();
    }
    rec.block_eta.push_back(current_dmin(res.w.weights));

    // strict ordering moves antennas against the precoder from before this sweep
    const CVector& w_pos = opts.strict_ordering ? w_prev : res.w.weights;
    if (opts.optimize_tx) {
      for (int k = 0; k < cfg.tx_antennas; ++k) {
        const BlockUpdate up = update_tx_position(k, res.layout, ch, w_pos, cb, cfg, opts.position_scan);
        rec.block_eta.push_back(opts.strict_ordering ? current_dmin(res.w.weights)
                                                           : up.eta_after);
      }
    }
    if (opts.optimize_rx) {
      for (int r = 0; r < cfg.rx_antennas; ++r) {
        const BlockUpdate up = update_rx_position(r, res.layout, ch, w_pos, cb, cfg, opts.position_scan);
        rec.block_eta.push_back(opts.strict_ordering ? current_dmin(res.w.weights)
                                                           : up.eta_after);
      }
    }

    const double next = current_dmin(res.w.weights);
    const double wall =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    rec.iterations = n + 1;
    rec.eta_history.push_back(next);
    rec.wall_ms.push_back(wall);
    snapshot();
    if (on_iteration) on_iteration({n + 1, next, wall});

    const double change = std::abs(next - eta) / std::max(eta, 1e-15);
    eta = next;
    if (change < opts.kappa) {
      rec.termination = Termination::converged;
      break;
    }
  }
  if (failed) rec.termination = Termination::solver_failure;
  res.d_min = eta;
  return res;
}

SolveResult optimize_multistart(const SystemConfig& cfg, const ChannelRealization& ch,
                                const SolverOptions& opts, std::uint64_t seed) {
  SolveResult best;
  bool have = false;
  const int starts = std::max(opts.starts, 1);
  const Initialization fpa = initialize(cfg, InitStrategy::fpa);
  for (int s = 0; s < starts; ++s) {
    Initialization init;
    if (s == 0) {
      init = initialize(cfg, opts.init, mix_seed(seed, 0));
    } else {
      init = initialize(cfg, InitStrategy::random, mix_seed(seed, static_cast<std::uint64_t>(s)));
    }
    // frozen sides stay on the lambda/2 grid
    if (!opts.optimize_tx) init.layout.u = fpa.layout.u;
    if (!opts.optimize_rx) init.layout.v = fpa.layout.v;
    SolveResult r = optimize(cfg, ch, init, opts);
    r.record.start = s;
    if (!have || r.d_min > best.d_min) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace mamimo

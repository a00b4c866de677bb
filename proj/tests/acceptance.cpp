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


// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mamimo/beamforming.hpp"
#include "mamimo/experiments.hpp"
#include "mamimo/position.hpp"

using namespace mamimo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::uint64_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

ExperimentConfig load(const char* name) {
  return load_config(std::string(MAMIMO_CONFIG_DIR) + "/" + name);
}

cdouble cgauss(std::mt19937_64& rng, double var = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
  const double re = n(rng);
  return {re, n(rng)};
}

CVector random_cvector(std::mt19937_64& rng, int n, double var = 1.0) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cgauss(rng, var);
  return v;
}

CMatrix random_cmatrix(std::mt19937_64& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = cgauss(rng);
  }
  return m;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

CVector random_precoder(std::mt19937_64& rng, int t, double power) {
  CVector w = random_cvector(rng, t);
  return w * std::sqrt(power) / w.norm();
}

// A random draw of everything an expansion depends on. Channels come from the
// experiment sampler, so the scales are the physical ones.
struct Tuple {
  SystemConfig cfg;
  ChannelRealization ch;
  AntennaLayout layout;
  CVector w;
  SmCodebook cb{4, 4};
  int antenna = 0;
  int pair = 0;
};

Tuple random_tuple(std::mt19937_64& rng, bool tx_side) {
  Tuple t;
  t.cfg.paths = 1 + static_cast<int>(rng() % 12);
  t.ch = sample_channel(t.cfg, rng);
  t.layout = {random_positions(4, t.cfg.tx_region, t.cfg.min_spacing, rng),
              random_positions(4, t.cfg.rx_region, t.cfg.min_spacing, rng)};
  t.w = random_precoder(rng, 4, t.cfg.tx_power);
  t.antenna = static_cast<int>(rng() % 4);
  do {
    t.pair = static_cast<int>(rng() % t.cb.pairs().size());
    // transmit pairs must involve the moving antenna to depend on it
  } while (tx_side && t.cb.pairs()[static_cast<std::size_t>(t.pair)].at(t.antenna) == cdouble(0.0, 0.0));
  return t;
}

// ||F(v)^H Sigma G(u) c||^2 straight from the defining sums.
double direct_norm(const AntennaLayout& layout, const ChannelRealization& ch, double wavelength,
                   const CVector& c) {
  const double kw = 2.0 * kPi / wavelength;
  double total = 0.0;
  for (std::size_t r = 0; r < layout.v.size(); ++r) {
    cdouble acc = 0.0;
    for (std::size_t t = 0; t < layout.u.size(); ++t) {
      cdouble h = 0.0;
      for (int j = 0; j < ch.rx_paths(); ++j) {
        const cdouble f = std::polar(1.0, kw * layout.v[r] * std::cos(ch.aoa()[static_cast<std::size_t>(j)]));
        for (int i = 0; i < ch.tx_paths(); ++i) {
          const cdouble g = std::polar(1.0, kw * layout.u[t] * std::cos(ch.aod()[static_cast<std::size_t>(i)]));
          h += std::conj(f) * ch.prm()(j, i) * g;
        }
      }
      acc += h * c(static_cast<Eigen::Index>(t));
    }
    total += std::norm(acc);
  }
  return total;
}

double grad_scale(const TrigSeries& s) {
  double g = 0.0;
  for (const auto& t : s.terms) g += t.amp * std::abs(t.freq);
  return g;
}

// Series for one tuple on either side, with the moved position.
struct Expanded {
  TrigSeries series;
  std::function<double(double)> direct;
  double point = 0.0;
};

Expanded expand(const Tuple& t, bool tx_side) {
  Expanded e;
  const CVector c = t.w.cwiseProduct(t.cb.pairs()[static_cast<std::size_t>(t.pair)].diff);
  const auto k = static_cast<std::size_t>(t.antenna);
  if (tx_side) {
    e.series = build_tx_expansion(t.antenna, t.pair, make_tx_basis(t.layout, t.ch, t.cfg.wavelength), t.w, t.cb).series;
    e.point = t.layout.u[k];
    e.direct = [t, c, k](double x) {
      AntennaLayout moved = t.layout;
      moved.u[k] = x;
      return direct_norm(moved, t.ch, t.cfg.wavelength, c);
    };
  } else {
    e.series = build_rx_expansion(t.antenna, t.pair, make_rx_basis(t.layout, t.ch, t.cfg.wavelength), t.w, t.cb).series;
    e.point = t.layout.v[k];
    e.direct = [t, c, k](double x) {
      AntennaLayout moved = t.layout;
      moved.v[k] = x;
      return direct_norm(moved, t.ch, t.cfg.wavelength, c);
    };
  }
  return e;
}

// 1. every block update keeps eta nondecreasing
Outcome monotone_trace() {
  const ExperimentConfig cfg = load("default.json");
  double worst = 0.0;
  int traces = 0;
  for (auto seed : seed_range(100)) {
    const ChannelRealization ch = channel_for_seed(cfg.system, seed);
    for (InitStrategy init : {InitStrategy::fpa, InitStrategy::random}) {
      const auto res = optimize(cfg.system, ch, initialize(cfg.system, init, solver_seed(seed)), cfg.solver);
      const auto& b = res.record.block_eta;
      for (std::size_t n = 1; n < b.size(); ++n) worst = std::min(worst, b[n] - b[n - 1]);
      ++traces;
    }
  }
  return {worst >= -1e-9, format("%d traces, largest drop %.3g (limit 1e-9)", traces, -worst)};
}

// 2. median AO iterations
Outcome iteration_count() {
  ExperimentConfig cfg = load("default.json");
  std::string detail;
  bool pass = true;
  for (int m : {2, 4}) {
    SystemConfig sys = cfg.system;
    sys.modulation_order = m;
    std::vector<int> its;
    for (auto seed : seed_range(50)) {
      const auto ch = channel_for_seed(sys, seed);
      its.push_back(optimize(sys, ch, initialize(sys, InitStrategy::fpa), cfg.solver).record.iterations);
    }
    std::sort(its.begin(), its.end());
    const double median = 0.5 * (its[24] + its[25]);
    pass = pass && median <= 10.0;
    detail += format("%sM=%d median %.1f max %d", detail.empty() ? "" : ", ", m, median, its.back());
  }
  return {pass, detail + " (limit 10)"};
}

BerSweep sweep_at(const ExperimentConfig& cfg, const std::vector<std::string>& schemes, double snr,
                  std::uint64_t channels) {
  return run_ber_vs_snr(cfg, schemes, {snr}, seed_range(channels));
}

// 3. BER ordering at 10 dB
Outcome ber_ordering() {
  ExperimentConfig cfg = load("comparison.json");
  cfg.experiment.min_bits = 100000;
  const auto sw = sweep_at(cfg, {"ma", "gas", "fpa"}, 10.0, 200);
  const double ma = sw.points[0].mean_ber, gas = sw.points[1].mean_ber, fpa = sw.points[2].mean_ber;
  long long min_bits = sw.points[0].total_bits;
  for (const auto& col : sw.per_channel) {
    for (const auto& c : col) min_bits = std::min(min_bits, c.ber[0].total_bits);
  }
  const bool pass = ma <= 0.5 * gas && ma <= 0.2 * fpa && min_bits >= 100000 && !sw.solver_failure;
  return {pass, format("200 channels, BER ma %.4g gas %.4g fpa %.4g, ma/gas %.3f (limit 0.5), "
                       "ma/fpa %.3f (limit 0.2), fewest bits %lld",
                       ma, gas, fpa, ma / gas, ma / fpa, min_bits)};
}

// 4. BER decreasing in the path count at 12 dB
Outcome ber_vs_paths() {
  ExperimentConfig cfg = load("comparison.json");
  cfg.solver.starts = 2;
  cfg.solver.position_scan = 64;
  const std::vector<std::string> schemes{"ma", "fpa", "gas", "ma-tx", "ma-rx"};
  const std::vector<int> paths{2, 4, 8, 12};
  const auto sweeps = run_ber_vs_paths(cfg, schemes, paths, 12.0, seed_range(100));
  bool pass = true;
  double worst = 1e300;  // smallest (decrease / standard error of the step)
  std::string worst_at;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t i = 0; i + 1 < paths.size(); ++i) {
      const BerPoint& a = sweeps[i].points[s];
      const BerPoint& b = sweeps[i + 1].points[s];
      const double se = std::hypot(a.std_err, b.std_err);
      const double drop = a.mean_ber - b.mean_ber;
      const bool ok = drop > 0.0 || drop > -3.0 * se;
      pass = pass && ok;
      const double z = se > 0.0 ? drop / se : (drop >= 0.0 ? 1e300 : -1e300);
      if (z < worst) {
        worst = z;
        worst_at = format("%s L=%d->%d", schemes[s].c_str(), paths[i], paths[i + 1]);
      }
    }
  }
  std::string curve;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    curve += " " + schemes[s] + ":";
    for (std::size_t i = 0; i < paths.size(); ++i) curve += format("%s%.3g", i ? "," : "", sweeps[i].points[s].mean_ber);
  }
  return {pass, format("100 channels; weakest step %s at %.2f SE (limit -3);%s", worst_at.c_str(), worst,
                       curve.c_str())};
}

// 5. first and second derivatives against central differences
Outcome derivatives() {
  std::mt19937_64 rng(5005);
  double g_err = 0.0, h_err = 0.0;
  for (bool tx : {true, false}) {
    for (int n = 0; n < 1000; ++n) {
      const Tuple t = random_tuple(rng, tx);
      const Expanded e = expand(t, tx);
      const double x = uniform(rng, 0.0, tx ? t.cfg.tx_region : t.cfg.rx_region);
      const double lam = t.cfg.wavelength;
      const double h1 = 1e-7 * lam;
      const double fd1 = (e.series.value(x + h1) - e.series.value(x - h1)) / (2 * h1);
      g_err = std::max(g_err, std::abs(e.series.grad(x) - fd1) / std::max(std::abs(fd1), grad_scale(e.series)));
      // the step follows the fastest term so that near-equal path angles
      // (tiny frequencies) do not drown the difference in round-off
      double fmax = 0.0;
      for (const auto& term : e.series.terms) fmax = std::max(fmax, std::abs(term.freq));
      const double h2 = fmax > 0.0 ? 1e-2 / fmax : 1e-4 * lam;
      auto second = [&](double h) {
        return (e.series.value(x + h) - 2 * e.series.value(x) + e.series.value(x - h)) / (h * h);
      };
      const double fd2 = (4.0 * second(h2 / 2) - second(h2)) / 3.0;
      const double he = std::abs(e.series.hess(x) - fd2) / std::max(std::abs(fd2), e.series.curvature_bound());
      h_err = std::max(h_err, he);
    }
  }
  return {g_err <= 1e-6 && h_err <= 1e-5,
          format("2000 tuples, gradient rel err %.2e (limit 1e-6), Hessian rel err %.2e (limit 1e-5)", g_err, h_err)};
}

// 6. expansion against the direct norm
Outcome expansion_identity() {
  std::mt19937_64 rng(6006);
  double worst = 0.0;
  for (bool tx : {true, false}) {
    for (int n = 0; n < 1000; ++n) {
      const Tuple t = random_tuple(rng, tx);
      const Expanded e = expand(t, tx);
      const double x = uniform(rng, 0.0, tx ? t.cfg.tx_region : t.cfg.rx_region);
      const double want = e.direct(x);
      worst = std::max(worst, std::abs(e.series.value(x) - want) / want);
    }
  }
  return {worst <= 1e-10, format("2000 tuples, rel err %.2e (limit 1e-10)", worst)};
}

// 7. surrogate minorant, tightness and curvature dominance
Outcome surrogate_properties() {
  std::mt19937_64 rng(7007);
  double below = 0.0, tight = 0.0, curv = 0.0;
  for (bool tx : {true, false}) {
    for (int n = 0; n < 1000; ++n) {
      const Tuple t = random_tuple(rng, tx);
      const Expanded e = expand(t, tx);
      const ScalarSurrogate s = make_surrogate(e.series, e.point);
      const double region = tx ? t.cfg.tx_region : t.cfg.rx_region;
      const double scale = e.series.constant + e.series.curvature_bound() * region * region;
      tight = std::max(tight, std::abs(surrogate_lb(e.point, s) - e.series.value(e.point)) / e.series.value(e.point));
      for (int i = 0; i < 100; ++i) {
        const double x = region * i / 99.0;
        below = std::max(below, (surrogate_lb(x, s) - e.series.value(x)) / scale);
        curv = std::max(curv, (std::abs(e.series.hess(x)) - s.epsilon) / std::max(s.epsilon, 1e-300));
      }
    }
  }
  return {below <= 1e-12 && tight <= 1e-12 && curv <= 1e-12,
          format("2000 tuples x 100 points, excess %.2e (limit 1e-12 scale), tightness %.2e, "
                 "|y''| over eps %.2e",
                 below, tight, curv)};
}

// 8. SCA linearization
Outcome linearization() {
  std::mt19937_64 rng(8008);
  const SmCodebook cb(4, 4);
  double under = 0.0, tight = 0.0, slope = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const CMatrix h = random_cmatrix(rng, 4, 4);
    const auto quads = build_pair_matrices(h, cb);
    const auto& q = quads[static_cast<std::size_t>(rng() % quads.size())];
    const CVector wn = random_precoder(rng, 4, uniform(rng, 0.1, 1.0));
    const auto lc = linearize(q, wn);
    const double scale = q.a.norm();
    const CVector w = random_cvector(rng, 4, 2.0);
    under = std::max(under, (lc.value(w) - q.value(w)) / scale);
    tight = std::max(tight, std::abs(lc.value(wn) - q.value(wn)) / std::max(q.value(wn), 1e-300));
    const CVector dir = random_cvector(rng, 4);
    const double step = 1e-6;
    const double fd = (q.value(wn + step * dir) - q.value(wn - step * dir)) / (2 * step);
    const double sd = (lc.value(wn + step * dir) - lc.value(wn - step * dir)) / (2 * step);
    slope = std::max(slope, std::abs(fd - sd) / std::max(1.0, std::abs(fd)));
  }
  return {under <= 1e-12 && tight <= 1e-12 && slope <= 1e-6,
          format("1000 samples, overshoot %.2e, tightness %.2e, slope mismatch %.2e", under, tight, slope)};
}

// max over a cubic grid of the ball of min_p constraint_p(w), with its
// resolution allowance
std::pair<double, double> ball_grid(const std::vector<LinearizedConstraint>& cs, double power, int per_axis) {
  const int t = static_cast<int>(cs.front().a.size());
  const int dim = 2 * t;
  const double r = std::sqrt(power);
  const double step = 2.0 * r / (per_axis - 1);
  double lip = 0.0;
  for (const auto& c : cs) lip = std::max(lip, c.a.norm());
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  double best = -1e300;
  CVector w(t);
  while (true) {
    double sq = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double x = -r + step * idx[static_cast<std::size_t>(d)];
      sq += x * x;
      if (d < t) w(d).real(x);
      else w(d - t).imag(x);
    }
    if (sq <= power) {
      double v = 1e300;
      for (const auto& c : cs) v = std::min(v, c.value(w));
      best = std::max(best, v);
    }
    int d = 0;
    while (d < dim && ++idx[static_cast<std::size_t>(d)] == per_axis) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == dim) break;
  }
  return {best, lip * (0.5 * step * std::sqrt(static_cast<double>(dim)) + step)};
}

// 9. inner solvers against dense grids
Outcome inner_oracles() {
  std::mt19937_64 rng(9009);
  bool w_ok = true;
  double w_gap = 0.0;
  for (int n = 0; n < 50; ++n) {
    const int t = 1 + n % 2;
    const SmCodebook cb(t, 2);
    const auto quads = build_pair_matrices(random_cmatrix(rng, 2, t), cb);
    const CVector wn = random_precoder(rng, t, uniform(rng, 0.3, 1.0));
    std::vector<LinearizedConstraint> cs;
    for (const auto& q : quads) cs.push_back(linearize(q, wn));
    const double tol = 1e-9;
    const auto sol = solve_w_subproblem(cs, 1.0, tol);
    const auto [grid, allowance] = ball_grid(cs, 1.0, t == 1 ? 801 : 41);
    w_ok = w_ok && sol.eta >= grid - tol && sol.eta <= grid + allowance + tol && sol.w.squaredNorm() <= 1.0 + 1e-9;
    w_gap = std::max(w_gap, std::abs(sol.eta - grid) / std::max(allowance + tol, 1e-300));
  }

  // position subproblems built from real expansions of every pair
  bool p_ok = true;
  double p_gap = 0.0;
  for (int n = 0; n < 50; ++n) {
    const Tuple t = random_tuple(rng, true);
    const TxBasis basis = make_tx_basis(t.layout, t.ch, t.cfg.wavelength);
    std::vector<ScalarSurrogate> ss;
    double lip = 0.0;
    const double region = t.cfg.tx_region;
    for (int p = 0; p < static_cast<int>(t.cb.pairs().size()); ++p) {
      if (t.cb.pairs()[static_cast<std::size_t>(p)].at(t.antenna) == cdouble(0.0, 0.0)) continue;
      const auto e = build_tx_expansion(t.antenna, p, basis, t.w, t.cb);
      ss.push_back(make_surrogate(e.series, t.layout.u[static_cast<std::size_t>(t.antenna)]));
      lip = std::max(lip, std::abs(ss.back().slope) + ss.back().epsilon * region);
    }
    const auto ivs = feasible_intervals(t.antenna, t.layout.u, region, t.cfg.min_spacing);
    auto g = [&](double x) {
      double v = 1e300;
      for (const auto& s : ss) v = std::min(v, s(x));
      return v;
    };
    double total = 0.0;
    for (const auto& iv : ivs) total += iv.hi - iv.lo;
    double grid = -1e300;
    for (const auto& iv : ivs) {
      const int pts = std::max(2, static_cast<int>(100000 * (iv.hi - iv.lo) / std::max(total, 1e-300)));
      for (int i = 0; i < pts; ++i) grid = std::max(grid, g(iv.lo + (iv.hi - iv.lo) * i / (pts - 1)));
    }
    const auto step = solve_position_subproblem(ss, ivs);
    bool inside = false;
    for (const auto& iv : ivs) inside = inside || iv.contains(step.position);
    const double allowed = 1e-6 * region * lip;
    p_ok = p_ok && inside && g(step.position) >= grid - allowed;
    p_gap = std::max(p_gap, (grid - g(step.position)) / std::max(allowed, 1e-300));
  }
  return {w_ok && p_ok, format("50 + 50 instances, precoder gap %.2f of allowance, position shortfall %.2f of 1e-6 A L",
                               w_gap, p_gap)};
}

// 10. detection and BER sanity
Outcome detection() {
  std::mt19937_64 rng(10010);
  const SmCodebook cb(4, 4);
  int wrong = 0;
  for (int n = 0; n < 200; ++n) {
    const CMatrix h = random_cmatrix(rng, 4, 4);
    const CVector w = random_precoder(rng, 4, 1.0);
    const MlDetector det(h, w, cb);
    for (int s = 0; s < cb.size(); ++s) wrong += det.detect(h * w.cwiseProduct(cb.symbol(s).vector_form)) != s;
  }
  BerOptions zero;
  zero.min_bits = zero.max_bits = 100000;
  const double half = simulate_ber(CMatrix::Zero(4, 4), Precoder::uniform(4, 1.0), cb, 10.0, zero, 1).ber;

  const ExperimentConfig cfg = load("default.json");
  const SystemConfig& sys = cfg.system;
  BerOptions o;
  o.min_bits = o.max_bits = 200000;
  o.tx_power = sys.tx_power;
  o.gain_reference = sys.snr_gain_reference();
  int within = 0;
  for (auto seed : seed_range(100)) {
    const auto ch = channel_for_seed(sys, seed);
    const Initialization init = initialize(sys, InitStrategy::random, seed);
    const CMatrix h = assemble_channel(init.layout, ch, sys.wavelength);
    const double snr = 10.0 + 2.0 * static_cast<double>(seed % 3);
    const auto r = simulate_ber(h, init.w, cb, snr, o, ber_seed(seed, "bound", snr));
    const double bound = pep_upper_bound(d_min(h, init.w.weights, cb), sys.noise_for_snr(snr),
                                         static_cast<double>(cb.pairs().size()));
    within += r.ser <= bound;
  }
  return {wrong == 0 && std::abs(half - 0.5) <= 0.02 && within >= 95,
          format("noiseless errors %d of 3200, zero-channel BER %.4f, SER under bound in %d of 100", wrong,
                 half, within)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"monotone AO objective", monotone_trace},
      {"convergence speed", iteration_count},
      {"BER ordering at 10 dB", ber_ordering},
      {"BER trend over path count", ber_vs_paths},
      {"derivative correctness", derivatives},
      {"expansion identity", expansion_identity},
      {"surrogate properties", surrogate_properties},
      {"linearization properties", linearization},
      {"inner solver oracles", inner_oracles},
      {"detection and BER sanity", detection},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%.0f s) %s\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                out.detail.c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}

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

#include "mamimo/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mamimo {

std::vector<PairQuadratic> build_pair_matrices(const CMatrix& h, const SmCodebook& cb) {
  if (h.cols() != cb.tx_antennas()) throw InvalidParameter("channel has wrong column count");
  const CMatrix gram = h.adjoint() * h;
  std::vector<PairQuadratic> out;
  out.reserve(cb.pairs().size());
  for (std::size_t p = 0; p < cb.pairs().size(); ++p) {
    const CVector& d = cb.pairs()[p].diff;
    CMatrix a = d.conjugate().asDiagonal() * gram * d.asDiagonal();
    PairQuadratic pq;
    pq.a = 0.5 * (a + a.adjoint());
    pq.pair = static_cast<int>(p);
    out.push_back(std::move(pq));
  }
  return out;
}

LinearizedConstraint linearize(const PairQuadratic& pq, const CVector& w_n) {
  LinearizedConstraint lc;
  const CVector aw = pq.a * w_n;
  lc.a = 2.0 * aw;
  lc.b = -w_n.dot(aw).real();
  lc.pair = pq.pair;
  return lc;
}

namespace {

// Real form of one constraint after scaling: q . x + beta, with ||x|| <= 1.
struct ScaledRow {
  RVector q;
  double beta;
};

CVector to_complex(const RVector& x, double radius) {
  const Eigen::Index t = x.size() / 2;
  CVector w(t);
  for (Eigen::Index i = 0; i < t; ++i) w(i) = radius * cdouble(x(i), x(t + i));
  return w;
}

double primal_value(const std::vector<ScaledRow>& rows, const RVector& x) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) v = std::min(v, r.q.dot(x) + r.beta);
  return v;
}

}  // namespace

InnerSolution solve_w_subproblem(std::span<const LinearizedConstraint> constraints, double power,
                                 double tol, int max_newton) {
  if (constraints.empty()) throw InvalidParameter("no constraints");
  if (!(power > 0.0)) throw InvalidParameter("power budget must be positive");
  const Eigen::Index t_ant = constraints.front().a.size();
  const Eigen::Index dim = 2 * t_ant;
  const double radius = std::sqrt(power);

  double scale = 0.0;
  for (const auto& c : constraints) {
    if (c.a.size() != t_ant) throw InvalidParameter("constraint dimensions disagree");
    scale = std::max(scale, std::abs(c.b) + c.a.norm() * radius);
  }
  InnerSolution sol;
  if (scale == 0.0) {
    sol.w = CVector::Zero(t_ant);
    return sol;
  }

  std::vector<ScaledRow> rows;
  rows.reserve(constraints.size());
  for (const auto& c : constraints) {
    ScaledRow r{RVector(dim), c.b / scale};
    for (Eigen::Index i = 0; i < t_ant; ++i) {
      r.q(i) = c.a(i).real() * radius / scale;
      r.q(t_ant + i) = c.a(i).imag() * radius / scale;
    }
    rows.push_back(std::move(r));
  }
  const double tol_scaled = tol / scale;
  const auto m = static_cast<double>(rows.size() + 1);

  // z = (x, eta); barrier objective -t*eta - sum log(s_p) - log(1 - |x|^2)
  RVector z = RVector::Zero(dim + 1);
  double beta_min = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) beta_min = std::min(beta_min, r.beta);
  z(dim) = beta_min - 1.0;

  auto slacks_ok = [&](const RVector& zz, std::vector<double>& s, double& ball) {
    ball = 1.0 - zz.head(dim).squaredNorm();
    if (!(ball > 0.0)) return false;
    for (std::size_t p = 0; p < rows.size(); ++p) {
      s[p] = rows[p].q.dot(zz.head(dim)) + rows[p].beta - zz(dim);
      if (!(s[p] > 0.0)) return false;
    }
    return true;
  };
  auto barrier = [&](double tt, const RVector& zz, const std::vector<double>& s, double ball) {
    double f = -tt * zz(dim) - std::log(ball);
    for (double sp : s) f -= std::log(sp);
    return f;
  };

  std::vector<double> s(rows.size()), s_try(rows.size());
  double ball = 0.0, ball_try = 0.0;
  slacks_ok(z, s, ball);

  RVector best_x = z.head(dim);
  double best_primal = primal_value(rows, best_x);
  double best_bound = std::numeric_limits<double>::infinity();

  double t = 1.0;
  const double mu = 4.0;
  RVector grad(dim + 1);
  RMatrix hess(dim + 1, dim + 1);
  RVector lam_q(dim);

  int steps = 0;
  while (steps < max_newton) {
    // Newton centering at fixed t
    for (int inner = 0; inner < 400 && steps < max_newton; ++inner, ++steps) {
      const RVector x = z.head(dim);
      grad.setZero();
      hess.setZero();
      grad(dim) = -t;
      double lam_sum = 0.0;
      lam_q.setZero();
      double lam_beta = 0.0;
      for (std::size_t p = 0; p < rows.size(); ++p) {
        const double inv = 1.0 / s[p];
        const double inv2 = inv * inv;
        grad.head(dim) -= inv * rows[p].q;
        grad(dim) += inv;
        hess.topLeftCorner(dim, dim).noalias() += inv2 * rows[p].q * rows[p].q.transpose();
        hess.block(0, dim, dim, 1) -= inv2 * rows[p].q;
        hess(dim, dim) += inv2;
        lam_sum += inv;
        lam_q += inv * rows[p].q;
        lam_beta += inv * rows[p].beta;
      }
      hess.block(dim, 0, 1, dim) = hess.block(0, dim, dim, 1).transpose();
      grad.head(dim) += (2.0 / ball) * x;
      hess.topLeftCorner(dim, dim) += (2.0 / ball) * RMatrix::Identity(dim, dim) +
                                      (4.0 / (ball * ball)) * x * x.transpose();

      // multipliers 1/(t s_p), normalized onto the simplex, give a valid bound
      const double bound = lam_q.norm() / lam_sum + lam_beta / lam_sum;
      best_bound = std::min(best_bound, bound);
      const double primal = primal_value(rows, x);
      if (primal > best_primal) {
        best_primal = primal;
        best_x = x;
      }
      if (best_bound - best_primal <= tol_scaled) break;

      const RVector step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-14) || !step.allFinite()) break;

      const double f0 = barrier(t, z, s, ball);
      double alpha = 1.0;
      RVector z_try = z + alpha * step;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        if (slacks_ok(z_try, s_try, ball_try) &&
            barrier(t, z_try, s_try, ball_try) <= f0 - 0.25 * alpha * decrement) {
          moved = true;
          break;
        }
        alpha *= 0.5;
        z_try = z + alpha * step;
      }
      if (!moved) break;
      z = z_try;
      s.swap(s_try);
      ball = ball_try;
      if (decrement < 1e-10) break;
    }
    if (best_bound - best_primal <= tol_scaled) break;
    if (m / t < 1e-3 * tol_scaled) break;
    t *= mu;
  }

  sol.w = to_complex(best_x, radius);
  sol.newton_steps = steps;
  sol.eta = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) sol.eta = std::min(sol.eta, c.value(sol.w));
  sol.upper_bound = best_bound * scale;
  if (best_bound - best_primal > tol_scaled) {
    throw SolverFailure("precoder subproblem did not reach its tolerance", sol.w, sol.eta);
  }
  return sol;
}

ScaResult sca_beamforming(const CMatrix& h, const SmCodebook& cb, const CVector& w_init,
                          double power, const ScaOptions& opts) {
  if (w_init.size() != cb.tx_antennas()) throw InvalidParameter("precoder has wrong length");
  if (!(w_init.squaredNorm() <= power + 1e-9)) throw InvalidParameter("initial precoder violates the power budget");

  const auto quads = build_pair_matrices(h, cb);
  const double tol_abs = std::max(opts.inner_tol * power * h.squaredNorm(),
                                  std::numeric_limits<double>::min());

  ScaResult res;
  res.w = w_init;
  std::vector<double> values(quads.size());
  auto evaluate = [&](const CVector& w) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < quads.size(); ++p) {
      values[p] = quads[p].value(w);
      lo = std::min(lo, values[p]);
    }
    return lo;
  };
  double current = evaluate(res.w);
  res.eta_history.push_back(current);

  std::vector<LinearizedConstraint> all(quads.size());
  std::vector<LinearizedConstraint> active;
  for (int it = 0; it < opts.max_iter; ++it) {
    for (std::size_t p = 0; p < quads.size(); ++p) all[p] = linearize(quads[p], res.w);

    active.clear();
    if (opts.prune_factor > 0.0 && current > 0.0) {
      for (std::size_t p = 0; p < quads.size(); ++p) {
        if (values[p] <= opts.prune_factor * current) active.push_back(all[p]);
      }
    }
    InnerSolution sol;
    try {
      if (!active.empty() && active.size() < all.size()) {
        sol = solve_w_subproblem(active, power, tol_abs);
        ++res.inner_solves;
        bool violated = false;
        for (const auto& c : all) {
          if (c.value(sol.w) < sol.eta) {
            violated = true;
            break;
          }
        }
        if (violated) {
          sol = solve_w_subproblem(all, power, tol_abs);
          ++res.inner_solves;
        }
      } else {
        sol = solve_w_subproblem(all, power, tol_abs);
        ++res.inner_solves;
      }
    } catch (const SolverFailure& e) {
      throw SolverFailure(e.what(), res.w, current);
    }
    ++res.iterations;

    const double next = evaluate(sol.w);
    if (!(next >= current)) break;
    const double gain = (next - current) / std::max(current, 1e-300);
    res.w = sol.w;
    current = next;
    res.eta_history.push_back(current);
    if (gain < opts.tol_outer) break;
  }
  return res;
}

}  // namespace mamimo

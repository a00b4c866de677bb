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

#include <span>
#include <vector>

#include "mamimo/codebook.hpp"
#include "mamimo/metrics.hpp"
#include "mamimo/types.hpp"

namespace mamimo {

/// A = X^H H^H H X with X = diag(x_i - x_j), so that w^H A w equals the
/// pair distance ||H diag{w} (x_i - x_j)||^2.
struct PairQuadratic {
  CMatrix a;
  int pair = -1;

  double value(const CVector& w) const { return w.dot(a * w).real(); }
};

/// Affine minorant Re{a^H w} + b of w^H A w, tight at the expansion point.
struct LinearizedConstraint {
  CVector a;  // 2 A w_n
  double b = 0.0;  // -(w_n^H A w_n)
  int pair = -1;

  double value(const CVector& w) const { return a.dot(w).real() + b; }
};

std::vector<PairQuadratic> build_pair_matrices(const CMatrix& h, const SmCodebook& cb);

LinearizedConstraint linearize(const PairQuadratic& pq, const CVector& w_n);

struct InnerSolution {
  CVector w;
  double eta = 0.0;  // min over constraints of their value at w
  double upper_bound = 0.0;  // certified bound on the subproblem optimum
  int newton_steps = 0;
};

/// Maximizes min_p (Re{a_p^H w} + b_p) subject to ||w||^2 <= power with a
/// log-barrier interior point method. Stops once the dual bound certifies
/// the returned eta within `tol` (absolute) of the optimum; throws
/// SolverFailure carrying the best strictly feasible iterate otherwise.
InnerSolution solve_w_subproblem(std::span<const LinearizedConstraint> constraints, double power,
                                 double tol, int max_newton = 5000);

struct ScaOptions {
  double tol_outer = 1e-4;
  int max_iter = 30;
  double inner_tol = 1e-8;  // relative to P_T * ||H||_F^2
  double prune_factor = 10.0;  // <= 0 disables pruning
};

struct ScaResult {
  CVector w;
  std::vector<double> eta_history;  // true d_min at w_init and each accepted iterate
  int iterations = 0;
  int inner_solves = 0;
};

/// Relinearize-and-solve loop for the precoder with positions fixed. The
/// history is nondecreasing: an iterate that would lower d_min is rejected
/// and the loop stops.
ScaResult sca_beamforming(const CMatrix& h, const SmCodebook& cb, const CVector& w_init,
                          double power, const ScaOptions& opts = {});

}  // namespace mamimo

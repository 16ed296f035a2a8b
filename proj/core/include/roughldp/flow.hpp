/*
 * Copyright 2026 The roughldp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <vector>

#include "roughldp/rough_core.hpp"
#include "roughldp/types.hpp"
#include "roughldp/vector_fields.hpp"

namespace roughldp {

/// Solution of the controlled ODE dphi = sigma(phi) u dt + b(eps, phi) dt
/// with u piecewise constant on the grid, plus its Jacobian flow.
struct SkeletonSolution {
  TimeGrid grid{1};
  int n = 0;
  int d = 0;
  double eps = 0.0;
  std::vector<Vec> phi;   // per node
  std::vector<Mat> M;     // Jacobian flow, M_0 = Id
  std::vector<Mat> Minv;  // integrated from dN = -N A dt
  Mat cov;                // M_1 int M_s^{-1} sigma sigma^T M_s^{-T} ds M_1^T
  /// Derivatives of the one-step map phi_{i+1} = Step(phi_i, u_i):
  /// d_phi[i] = dStep/dphi (n x n), d_u[i] = dStep/du (n x d).
  std::vector<Mat> d_phi;
  std::vector<Mat> d_u;

  const Vec& endpoint() const { return phi.back(); }
  SampledPath path() const;
};

struct FlowOptions {
  bool tangents = true;     // keep d_phi, d_u
  bool covariance = true;   // assemble cov (needs Minv)
};

/// Classical fourth-order one-step scheme per cell with the control held
/// constant on the cell. Non-finite states throw NumericalError.
SkeletonSolution solve_controlled(const VectorFieldSystem& vf,
                                  const CameronMartinPath& u, const Vec& a,
                                  double eps, FlowOptions opts = {});

/// Skeleton phi^0(h): the controlled ODE with drift b(0, .).
SkeletonSolution solve_skeleton(const VectorFieldSystem& vf,
                                const CameronMartinPath& h, const Vec& a,
                                FlowOptions opts = {});

/// phi^0(h)_1 only; no flow matrices.
Vec skeleton_endpoint(const VectorFieldSystem& vf, const CameronMartinPath& h,
                      const Vec& a, double eps = 0.0);

/// Step-2 Euler scheme
///   y_{i+1} = y_i + sum_j V_j(y_i) X^{1;j} + sum_{j,k} (DV_k V_j)(y_i) X^{2;jk}
/// driven by a rough path of dimension d (drift added as b(eps, y) dt) or
/// d + 1 whose last coordinate is time (drift enters as the field V_{d+1}).
SampledPath solve_rde_level2(const VectorFieldSystem& vf, const Level2RoughPath& x,
                             double eps, const Vec& a);

/// phi^1_1 = M_1 int_0^1 M_s^{-1} [sigma(phi^0_s) dw_s + d_eps b(0, phi^0_s) ds]
/// by the trapezoid rule with polygonal dw. w may live on a grid that nests
/// into the skeleton grid.
Vec first_variation(const VectorFieldSystem& vf, const SkeletonSolution& skel,
                    const SampledPath& w);

/// Mean of phi^1_1 under Wiener measure: M_1 int M_s^{-1} d_eps b(0, phi^0_s) ds.
Vec first_variation_mean(const VectorFieldSystem& vf, const SkeletonSolution& skel);

/// Derivative of h -> phi(h)_1 in direction k, propagated through the
/// tangents of the one-step map (exact for the discrete solution).
Vec endpoint_gradient(const SkeletonSolution& skel, const CameronMartinPath& k);

/// The same derivative by quadrature of M_1 int M_s^{-1} sigma(phi_s) k'_s ds.
Vec endpoint_gradient_quadrature(const VectorFieldSystem& vf,
                                 const SkeletonSolution& skel,
                                 const CameronMartinPath& k);

/// Deterministic Malliavin covariance of the skeleton.
Mat det_malliavin_cov(const SkeletonSolution& skel);

/// Gradient with respect to the per-cell controls u_i of
///   sum_i g_i . phi_i,
/// with node_weights[i] = g_i (size n_nodes; entry 0 is ignored).
/// Returns n_steps * d values, cell-major.
std::vector<double> control_vjp(const SkeletonSolution& skel,
                                const std::vector<Vec>& node_weights);

/// control_vjp with a single weight on the endpoint.
std::vector<double> endpoint_vjp(const SkeletonSolution& skel, const Vec& lambda);

}  // namespace roughldp

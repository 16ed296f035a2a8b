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

#include "roughldp/flow.hpp"

#include <cmath>
#include <string>

#include "roughldp/error.hpp"

namespace roughldp {

namespace {

using Tan = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim,
                          2 * kMaxDim>;

// f(xi) = sigma(xi) u + b(eps, xi) and A = df/dxi, B = df/du = sigma(xi).
struct Stage {
  Vec f;
  Mat A;
  Mat B;
};

class Field {
 public:
  Field(const VectorFieldSystem& vf, double eps)
      : vf_(vf), eps_(eps), n_(vf.n()), d_(vf.d()), ds_(n_, d_), jb_(n_, n_), b_(n_) {}

  void eval(const Vec& xi, const Vec& u, bool jacobian, Stage& s) {
    s.B.resize(n_, d_);
    vf_.sigma(xi, s.B);
    vf_.drift(eps_, xi, b_);
    s.f = s.B * u + b_;
    if (!jacobian) return;
    vf_.drift_jacobian(eps_, xi, jb_);
    s.A = jb_;
    for (int k = 0; k < n_; ++k) {
      vf_.sigma_derivative(xi, k, ds_);
      s.A.col(k) += ds_ * u;
    }
  }

 private:
  const VectorFieldSystem& vf_;
  double eps_;
  int n_, d_;
  Mat ds_, jb_;
  Vec b_;
};

void check_finite(const Vec& y, int step) {
  if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e150) {
    throw NumericalError("solution blew up at step " + std::to_string(step));
  }
}

Vec cell_vec(std::span<const double> s) {
  Vec v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

}  // namespace

SampledPath SkeletonSolution::path() const {
  std::vector<double> v(static_cast<std::size_t>(grid.n_nodes()) * n);
  for (int i = 0; i < grid.n_nodes(); ++i) {
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(i) * n + k] = phi[i](k);
  }
  return SampledPath(grid, n, std::move(v));
}

SkeletonSolution solve_controlled(const VectorFieldSystem& vf,
                                  const CameronMartinPath& u, const Vec& a,
                                  double eps, FlowOptions opts) {
  const int n = vf.n();
  const int d = vf.d();
  if (a.size() != n) throw ValidationError("solve_controlled: a has wrong dimension");
  if (u.dim() != d) throw ValidationError("solve_controlled: control has wrong dimension");
  const TimeGrid& g = u.grid();
  const int steps = g.n_steps();
  const double dt = g.dt();

  SkeletonSolution sol;
  sol.grid = g;
  sol.n = n;
  sol.d = d;
  sol.eps = eps;
  sol.phi.resize(static_cast<std::size_t>(steps) + 1);
  sol.M.resize(static_cast<std::size_t>(steps) + 1);
  if (opts.covariance) sol.Minv.resize(static_cast<std::size_t>(steps) + 1);
  if (opts.tangents) {
    sol.d_phi.resize(static_cast<std::size_t>(steps));
    sol.d_u.resize(static_cast<std::size_t>(steps));
  }
  sol.phi[0] = a;
  sol.M[0] = Mat::Identity(n, n);
  if (opts.covariance) sol.Minv[0] = Mat::Identity(n, n);

  Field field(vf, eps);
  Stage s1, s2, s3, s4;
  Tan base = Tan::Zero(n, n + d);
  base.leftCols(n) = Mat::Identity(n, n);
  Tan t1(n, n + d), t2(n, n + d), t3(n, n + d), t4(n, n + d);

  for (int i = 0; i < steps; ++i) {
    const Vec ui = cell_vec(u.derivative(i));
    const Vec& y = sol.phi[i];
    field.eval(y, ui, true, s1);
    field.eval(y + 0.5 * dt * s1.f, ui, true, s2);
    field.eval(y + 0.5 * dt * s2.f, ui, true, s3);
    field.eval(y + dt * s3.f, ui, true, s4);
    sol.phi[i + 1] = y + (dt / 6.0) * (s1.f + 2.0 * s2.f + 2.0 * s3.f + s4.f);
    check_finite(sol.phi[i + 1], i + 1);

    t1.leftCols(n) = s1.A;
    t1.rightCols(d) = s1.B;
    t2 = s2.A * (base + 0.5 * dt * t1);
    t2.rightCols(d) += s2.B;
    t3 = s3.A * (base + 0.5 * dt * t2);
    t3.rightCols(d) += s3.B;
    t4 = s4.A * (base + dt * t3);
    t4.rightCols(d) += s4.B;
    const Tan step = base + (dt / 6.0) * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
    const Mat dphi = step.leftCols(n);
    sol.M[i + 1] = dphi * sol.M[i];
    if (opts.tangents) {
      sol.d_phi[i] = dphi;
      sol.d_u[i] = step.rightCols(d);
    }
    if (opts.covariance) {
      const Mat& nn = sol.Minv[i];
      const Mat n1 = -nn * s1.A;
      const Mat n2 = -(nn + 0.5 * dt * n1) * s2.A;
      const Mat n3 = -(nn + 0.5 * dt * n2) * s3.A;
      const Mat n4 = -(nn + dt * n3) * s4.A;
      sol.Minv[i + 1] = nn + (dt / 6.0) * (n1 + 2.0 * n2 + 2.0 * n3 + n4);
    }
  }

  if (opts.covariance) {
    Mat acc = Mat::Zero(n, n);
    Mat s(n, d);
    for (int i = 0; i <= steps; ++i) {
      vf.sigma(sol.phi[i], s);
      const Mat ns = sol.Minv[i] * s;
      const double w = (i == 0 || i == steps) ? 0.5 * dt : dt;
      acc += w * (ns * ns.transpose());
    }
    const Mat& m1 = sol.M.back();
    Mat c = m1 * acc * m1.transpose();
    sol.cov = 0.5 * (c + c.transpose());
  }
  return sol;
}

SkeletonSolution solve_skeleton(const VectorFieldSystem& vf,
                                const CameronMartinPath& h, const Vec& a,
                                FlowOptions opts) {
  return solve_controlled(vf, h, a, 0.0, opts);
}

Vec skeleton_endpoint(const VectorFieldSystem& vf, const CameronMartinPath& h,
                      const Vec& a, double eps) {
  if (a.size() != vf.n()) throw ValidationError("skeleton_endpoint: a has wrong dimension");
  if (h.dim() != vf.d()) throw ValidationError("skeleton_endpoint: control has wrong dimension");
  const double dt = h.grid().dt();
  Field field(vf, eps);
  Stage s1, s2, s3, s4;
  Vec y = a;
  for (int i = 0; i < h.grid().n_steps(); ++i) {
    const Vec ui = cell_vec(h.derivative(i));
    field.eval(y, ui, false, s1);
    field.eval(y + 0.5 * dt * s1.f, ui, false, s2);
    field.eval(y + 0.5 * dt * s2.f, ui, false, s3);
    field.eval(y + dt * s3.f, ui, false, s4);
    y += (dt / 6.0) * (s1.f + 2.0 * s2.f + 2.0 * s3.f + s4.f);
    check_finite(y, i + 1);
  }
  return y;
}

SampledPath solve_rde_level2(const VectorFieldSystem& vf, const Level2RoughPath& x,
                             double eps, const Vec& a) {
  const int n = vf.n();
  const int d = vf.d();
  const int dim = x.dim();
  if (a.size() != n) throw ValidationError("solve_rde_level2: a has wrong dimension");
  if (dim != d && dim != d + 1) {
    throw ValidationError("solve_rde_level2: driver dimension must be d or d + 1");
  }
  const bool paired = dim == d + 1;
  const TimeGrid& g = x.grid();
  const int steps = g.n_steps();
  const double dt = g.dt();
  const auto& c1 = x.first_cells();
  const auto& c2 = x.second_cells();

  std::vector<double> out(static_cast<std::size_t>(steps + 1) * n);
  Vec y = a;
  for (int k = 0; k < n; ++k) out[k] = y(k);

  Mat sig(n, d);
  Mat jb(n, n);
  Vec b(n);
  Mat ds[kMaxDim];
  // fields(:, j) = V_j(y); jac[j] = DV_j(y) (n x n)
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim + 1> fields(n, dim);
  Mat jac[kMaxDim + 1];
  for (int i = 0; i < steps; ++i) {
    vf.sigma(y, sig);
    vf.drift(eps, y, b);
    for (int l = 0; l < n; ++l) {
      ds[l].resize(n, d);
      vf.sigma_derivative(y, l, ds[l]);
    }
    fields.leftCols(d) = sig;
    for (int j = 0; j < d; ++j) {
      jac[j].resize(n, n);
      for (int l = 0; l < n; ++l) jac[j].col(l) = ds[l].col(j);
    }
    if (paired) {
      fields.col(d) = b;
      vf.drift_jacobian(eps, y, jb);
      jac[d] = jb;
    }
    const double* a1 = c1.data() + static_cast<std::size_t>(i) * dim;
    const double* a2 = c2.data() + static_cast<std::size_t>(i) * dim * dim;
    Vec step = Vec::Zero(n);
    for (int j = 0; j < dim; ++j) step += fields.col(j) * a1[j];
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        const double w = a2[j * dim + k];
        if (w != 0.0) step += (jac[k] * fields.col(j)) * w;
      }
    }
    if (!paired) step += b * dt;
    y += step;
    check_finite(y, i + 1);
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(i + 1) * n + k] = y(k);
  }
  return SampledPath(g, n, std::move(out));
}

namespace {

void require_minv(const SkeletonSolution& skel, const char* who) {
  if (skel.Minv.empty()) {
    throw ValidationError(std::string(who) + ": skeleton solved without inverse flow");
  }
}

}  // namespace

Vec first_variation(const VectorFieldSystem& vf, const SkeletonSolution& skel,
                    const SampledPath& w) {
  require_minv(skel, "first_variation");
  if (w.dim() != skel.d) throw ValidationError("first_variation: driver dimension mismatch");
  const SampledPath wf = w.grid() == skel.grid ? w : w.refined(skel.grid);
  const int n = skel.n;
  const int d = skel.d;
  const int steps = skel.grid.n_steps();
  const double dt = skel.grid.dt();
  Mat s0(n, d), s1(n, d);
  Vec e0(n), e1(n);
  vf.sigma(skel.phi[0], s0);
  vf.drift_eps(0.0, skel.phi[0], e0);
  Mat ns0 = skel.Minv[0] * s0;
  Vec ne0 = skel.Minv[0] * e0;
  Vec acc = Vec::Zero(n);
  Vec dw(d);
  for (int i = 0; i < steps; ++i) {
    vf.sigma(skel.phi[i + 1], s1);
    vf.drift_eps(0.0, skel.phi[i + 1], e1);
    const Mat ns1 = skel.Minv[i + 1] * s1;
    const Vec ne1 = skel.Minv[i + 1] * e1;
    for (int p = 0; p < d; ++p) dw(p) = wf(i + 1, p) - wf(i, p);
    acc += 0.5 * (ns0 + ns1) * dw + 0.5 * dt * (ne0 + ne1);
    ns0 = ns1;
    ne0 = ne1;
  }
  return skel.M.back() * acc;
}

Vec first_variation_mean(const VectorFieldSystem& vf, const SkeletonSolution& skel) {
  return first_variation(vf, skel, SampledPath::zeros(skel.grid, skel.d));
}

Vec endpoint_gradient(const SkeletonSolution& skel, const CameronMartinPath& k) {
  if (skel.d_phi.empty()) {
    throw ValidationError("endpoint_gradient: skeleton solved without tangents");
  }
  if (k.dim() != skel.d) throw ValidationError("endpoint_gradient: direction dimension mismatch");
  const CameronMartinPath kf = k.grid() == skel.grid ? k : k.refined(skel.grid);
  Vec delta = Vec::Zero(skel.n);
  for (int i = 0; i < skel.grid.n_steps(); ++i) {
    delta = skel.d_phi[i] * delta + skel.d_u[i] * cell_vec(kf.derivative(i));
  }
  return delta;
}

Vec endpoint_gradient_quadrature(const VectorFieldSystem& vf,
                                 const SkeletonSolution& skel,
                                 const CameronMartinPath& k) {
  require_minv(skel, "endpoint_gradient_quadrature");
  if (k.dim() != skel.d) {
    throw ValidationError("endpoint_gradient_quadrature: direction dimension mismatch");
  }
  const CameronMartinPath kf = k.grid() == skel.grid ? k : k.refined(skel.grid);
  const int n = skel.n;
  const int d = skel.d;
  const double dt = skel.grid.dt();
  Mat s0(n, d), s1(n, d);
  vf.sigma(skel.phi[0], s0);
  Mat ns0 = skel.Minv[0] * s0;
  Vec acc = Vec::Zero(n);
  for (int i = 0; i < skel.grid.n_steps(); ++i) {
    vf.sigma(skel.phi[i + 1], s1);
    const Mat ns1 = skel.Minv[i + 1] * s1;
    acc += 0.5 * dt * (ns0 + ns1) * cell_vec(kf.derivative(i));
    ns0 = ns1;
  }
  return skel.M.back() * acc;
}

Mat det_malliavin_cov(const SkeletonSolution& skel) {
  if (skel.cov.size() == 0) {
    throw ValidationError("det_malliavin_cov: skeleton solved without covariance");
  }
  return skel.cov;
}

std::vector<double> control_vjp(const SkeletonSolution& skel,
                                const std::vector<Vec>& node_weights) {
  if (skel.d_phi.empty()) throw ValidationError("control_vjp: skeleton solved without tangents");
  const int steps = skel.grid.n_steps();
  if (static_cast<int>(node_weights.size()) != steps + 1) {
    throw ValidationError("control_vjp: need one weight per grid node");
  }
  const int d = skel.d;
  std::vector<double> grad(static_cast<std::size_t>(steps) * d);
  Vec p = node_weights[steps];
  for (int i = steps - 1; i >= 0; --i) {
    const Vec gi = skel.d_u[i].transpose() * p;
    for (int q = 0; q < d; ++q) grad[static_cast<std::size_t>(i) * d + q] = gi(q);
    p = skel.d_phi[i].transpose() * p;
    if (i > 0) p += node_weights[i];
  }
  return grad;
}

std::vector<double> endpoint_vjp(const SkeletonSolution& skel, const Vec& lambda) {
  std::vector<Vec> w(static_cast<std::size_t>(skel.grid.n_nodes()), Vec::Zero(skel.n));
  w.back() = lambda;
  return control_vjp(skel, w);
}

}  // namespace roughldp

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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "roughldp/types.hpp"

namespace roughldp {

/// State dimension n, driver dimension d, diffusion matrix
/// sigma = [V_1 ... V_d] : R^n -> R^{n x d}, drift b(eps, xi) and the
/// derivatives the flow solvers need.
class VectorFieldSystem {
 public:
  using Sigma = std::function<void(const Vec& xi, Mat& out)>;
  /// d sigma / d xi_k, an n x d matrix.
  using SigmaDerivative = std::function<void(const Vec& xi, int k, Mat& out)>;
  using Drift = std::function<void(double eps, const Vec& xi, Vec& out)>;
  /// d b / d xi, n x n.
  using DriftJacobian = std::function<void(double eps, const Vec& xi, Mat& out)>;
  /// d b / d eps.
  using DriftEps = std::function<void(double eps, const Vec& xi, Vec& out)>;

  struct Callbacks {
    Sigma sigma;
    SigmaDerivative sigma_derivative;
    Drift drift;
    DriftJacobian drift_jacobian;
    DriftEps drift_eps;
  };

  /// Validates the derivative callbacks against central differences at
  /// random probes unless `validate` is false; a mismatch above 1e-5
  /// relative throws ValidationError.
  VectorFieldSystem(std::string name, int n, int d, Callbacks cb,
                    bool validate = true);

  const std::string& name() const noexcept { return name_; }
  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }

  void sigma(const Vec& xi, Mat& out) const { cb_.sigma(xi, out); }
  void sigma_derivative(const Vec& xi, int k, Mat& out) const {
    cb_.sigma_derivative(xi, k, out);
  }
  void drift(double eps, const Vec& xi, Vec& out) const { cb_.drift(eps, xi, out); }
  void drift_jacobian(double eps, const Vec& xi, Mat& out) const {
    cb_.drift_jacobian(eps, xi, out);
  }
  void drift_eps(double eps, const Vec& xi, Vec& out) const {
    cb_.drift_eps(eps, xi, out);
  }

  Mat sigma(const Vec& xi) const;
  Vec drift(double eps, const Vec& xi) const;

  /// Smallest eigenvalue of sigma(a) sigma(a)^T.
  double ellipticity(const Vec& a) const;
  /// Throws ValidationError when the ellipticity at a is not positive.
  void require_elliptic(const Vec& a, double tol = 1e-12) const;

  /// Largest relative central-difference mismatch found at construction
  /// (zero when validation was skipped).
  double derivative_mismatch() const noexcept { return mismatch_; }

 private:
  double check_derivatives() const;

  std::string name_;
  int n_;
  int d_;
  Callbacks cb_;
  double mismatch_ = 0.0;
};

using SystemParams = std::map<std::string, double>;

/// A catalog system together with default endpoints (a, a').
struct CatalogSystem {
  VectorFieldSystem system;
  Vec a;
  Vec a_prime;
};

/// Built-in systems:
///   additive    sigma = Id_dim, b = 0                   (dim)
///   linear1d    sigma(xi) = s xi, b = r xi              (s, r)
///   rotating2d  sigma = rotation by kappa (xi1 + xi2),
///               b = -gamma xi + eps beta                (kappa, gamma, beta1, beta2)
///   random      smooth elliptic-at-a system from a seed (n, d, seed, scale)
///   null        sigma = 0, b = 0                        (dim)
/// Unknown names or parameter keys throw ValidationError. Parameters a1..an
/// and ap1..apn override the default endpoints.
CatalogSystem make_system(const std::string& name, const SystemParams& params = {});

/// Names accepted by make_system.
const std::vector<std::string>& catalog_names();

/// Elliptic-at-origin random system with n = d, used by the property scans.
VectorFieldSystem random_system(int n, int d, std::uint64_t seed,
                                double scale = 0.3);

}  // namespace roughldp

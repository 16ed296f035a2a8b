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

#include "roughldp/vector_fields.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include <Eigen/Eigenvalues>

#include "roughldp/error.hpp"
#include "roughldp/parallel.hpp"

namespace roughldp {

VectorFieldSystem::VectorFieldSystem(std::string name, int n, int d,
                                     Callbacks cb, bool validate)
    : name_(std::move(name)), n_(n), d_(d), cb_(std::move(cb)) {
  if (n < 1 || d < 1 || n > kMaxDim || d > kMaxDim) {
    throw ValidationError("VectorFieldSystem '" + name_ +
                          "': dimensions must lie in [1, 8]");
  }
  if (!cb_.sigma || !cb_.sigma_derivative || !cb_.drift || !cb_.drift_jacobian ||
      !cb_.drift_eps) {
    throw ValidationError("VectorFieldSystem '" + name_ + "': missing callback");
  }
  if (validate) {
    mismatch_ = check_derivatives();
    if (!(mismatch_ <= 1e-5)) {
      throw ValidationError("VectorFieldSystem '" + name_ +
                            "': derivative callbacks disagree with central "
                            "differences (relative mismatch " +
                            std::to_string(mismatch_) + ")");
    }
  }
}

Mat VectorFieldSystem::sigma(const Vec& xi) const {
  Mat out(n_, d_);
  cb_.sigma(xi, out);
  return out;
}

Vec VectorFieldSystem::drift(double eps, const Vec& xi) const {
  Vec out(n_);
  cb_.drift(eps, xi, out);
  return out;
}

double VectorFieldSystem::ellipticity(const Vec& a) const {
  if (a.size() != n_) throw ValidationError("ellipticity: wrong state dimension");
  const Mat s = sigma(a);
  const Eigen::MatrixXd g = s * s.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void VectorFieldSystem::require_elliptic(const Vec& a, double tol) const {
  const double lam = ellipticity(a);
  if (!(lam > tol)) {
    throw ValidationError("system '" + name_ +
                          "' is not elliptic at the starting point "
                          "(smallest eigenvalue of sigma sigma^T = " +
                          std::to_string(lam) + ")");
  }
}

namespace {

double rel_gap(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

}  // namespace

double VectorFieldSystem::check_derivatives() const {
  constexpr int kProbes = 4;
  constexpr double kStep = 1e-5;
  RandomStream rng(0x5eedf1e1dULL, static_cast<std::uint64_t>(n_ * 16 + d_));
  double worst = 0.0;
  Mat s_plus(n_, d_), s_minus(n_, d_), ds(n_, d_), jac(n_, n_);
  Vec b_plus(n_), b_minus(n_), db(n_);
  for (int probe = 0; probe < kProbes; ++probe) {
    Vec xi(n_);
    for (int i = 0; i < n_; ++i) xi(i) = rng.normal();
    const double eps = rng.uniform();
    for (int k = 0; k < n_; ++k) {
      Vec xp = xi, xm = xi;
      xp(k) += kStep;
      xm(k) -= kStep;
      cb_.sigma(xp, s_plus);
      cb_.sigma(xm, s_minus);
      cb_.sigma_derivative(xi, k, ds);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < d_; ++j) {
          worst = std::max(worst, rel_gap(ds(i, j), (s_plus(i, j) - s_minus(i, j)) /
                                                        (2 * kStep)));
        }
      }
      cb_.drift(eps, xp, b_plus);
      cb_.drift(eps, xm, b_minus);
      cb_.drift_jacobian(eps, xi, jac);
      for (int i = 0; i < n_; ++i) {
        worst = std::max(worst,
                         rel_gap(jac(i, k), (b_plus(i) - b_minus(i)) / (2 * kStep)));
      }
    }
    cb_.drift(eps + kStep, xi, b_plus);
    cb_.drift(eps - kStep, xi, b_minus);
    cb_.drift_eps(eps, xi, db);
    for (int i = 0; i < n_; ++i) {
      worst = std::max(worst, rel_gap(db(i), (b_plus(i) - b_minus(i)) / (2 * kStep)));
    }
  }
  return worst;
}

namespace {

class ParamReader {
 public:
  ParamReader(const std::string& system, const SystemParams& params)
      : system_(system), params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  int get_int(const std::string& key, int fallback) {
    const double v = get(key, fallback);
    if (v != std::floor(v)) {
      throw ValidationError("system '" + system_ + "': parameter " + key +
                            " must be an integer");
    }
    return static_cast<int>(v);
  }

  Vec endpoint(const std::string& prefix, Vec fallback) {
    for (int i = 0; i < fallback.size(); ++i) {
      fallback(i) = get(prefix + std::to_string(i + 1), fallback(i));
    }
    return fallback;
  }

  void reject_unused() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) {
        throw ValidationError("system '" + system_ + "': unknown parameter '" +
                              key + "'");
      }
    }
  }

 private:
  std::string system_;
  const SystemParams& params_;
  std::set<std::string> used_;
};

VectorFieldSystem make_additive(int dim) {
  VectorFieldSystem::Callbacks cb;
  cb.sigma = [dim](const Vec&, Mat& out) { out = Mat::Identity(dim, dim); };
  cb.sigma_derivative = [dim](const Vec&, int, Mat& out) {
    out = Mat::Zero(dim, dim);
  };
  cb.drift = [dim](double, const Vec&, Vec& out) { out = Vec::Zero(dim); };
  cb.drift_jacobian = [dim](double, const Vec&, Mat& out) {
    out = Mat::Zero(dim, dim);
  };
  cb.drift_eps = [dim](double, const Vec&, Vec& out) { out = Vec::Zero(dim); };
  return VectorFieldSystem("additive", dim, dim, std::move(cb));
}

VectorFieldSystem make_null(int dim) {
  VectorFieldSystem::Callbacks cb;
  cb.sigma = [dim](const Vec&, Mat& out) { out = Mat::Zero(dim, dim); };
  cb.sigma_derivative = [dim](const Vec&, int, Mat& out) {
    out = Mat::Zero(dim, dim);
  };
  cb.drift = [dim](double, const Vec&, Vec& out) { out = Vec::Zero(dim); };
  cb.drift_jacobian = [dim](double, const Vec&, Mat& out) {
    out = Mat::Zero(dim, dim);
  };
  cb.drift_eps = [dim](double, const Vec&, Vec& out) { out = Vec::Zero(dim); };
  return VectorFieldSystem("null", dim, dim, std::move(cb));
}

VectorFieldSystem make_linear1d(double s, double r) {
  VectorFieldSystem::Callbacks cb;
  cb.sigma = [s](const Vec& xi, Mat& out) {
    out.resize(1, 1);
    out(0, 0) = s * xi(0);
  };
  cb.sigma_derivative = [s](const Vec&, int, Mat& out) {
    out.resize(1, 1);
    out(0, 0) = s;
  };
  cb.drift = [r](double, const Vec& xi, Vec& out) {
    out.resize(1);
    out(0) = r * xi(0);
  };
  cb.drift_jacobian = [r](double, const Vec&, Mat& out) {
    out.resize(1, 1);
    out(0, 0) = r;
  };
  cb.drift_eps = [](double, const Vec&, Vec& out) { out = Vec::Zero(1); };
  return VectorFieldSystem("linear1d", 1, 1, std::move(cb));
}

VectorFieldSystem make_rotating2d(double kappa, double gamma, double beta1,
                                  double beta2) {
  VectorFieldSystem::Callbacks cb;
  cb.sigma = [kappa](const Vec& xi, Mat& out) {
    const double th = kappa * (xi(0) + xi(1));
    const double c = std::cos(th), s = std::sin(th);
    out.resize(2, 2);
    out << c, -s, s, c;
  };
  cb.sigma_derivative = [kappa](const Vec& xi, int, Mat& out) {
    const double th = kappa * (xi(0) + xi(1));
    const double c = std::cos(th), s = std::sin(th);
    out.resize(2, 2);
    out << -s * kappa, -c * kappa, c * kappa, -s * kappa;
  };
  cb.drift = [gamma, beta1, beta2](double eps, const Vec& xi, Vec& out) {
    out.resize(2);
    out(0) = -gamma * xi(0) + eps * beta1;
    out(1) = -gamma * xi(1) + eps * beta2;
  };
  cb.drift_jacobian = [gamma](double, const Vec&, Mat& out) {
    out = -gamma * Mat::Identity(2, 2);
  };
  cb.drift_eps = [beta1, beta2](double, const Vec&, Vec& out) {
    out.resize(2);
    out << beta1, beta2;
  };
  return VectorFieldSystem("rotating2d", 2, 2, std::move(cb));
}

// sigma_ij = A0_ij + scale sum_l A_l,ij sin(w_l . xi + p_l)
// b_i      = scale c_i sin(v_i . xi + q_i) + eps beta_i
struct RandomCoefficients {
  static constexpr int kModes = 2;
  int n = 0, d = 0;
  double scale = 0.0;
  Mat a0;
  Mat amp[kModes];
  Vec freq[kModes];
  double phase[kModes] = {};
  Vec c, beta, q;
  Mat v;  // row i is v_i
};

VectorFieldSystem build_random(const std::shared_ptr<const RandomCoefficients>& rc,
                               const std::string& name) {
  const int n = rc->n, d = rc->d;
  VectorFieldSystem::Callbacks cb;
  cb.sigma = [rc](const Vec& xi, Mat& out) {
    out = rc->a0;
    for (int l = 0; l < RandomCoefficients::kModes; ++l) {
      out += rc->scale * std::sin(rc->freq[l].dot(xi) + rc->phase[l]) * rc->amp[l];
    }
  };
  cb.sigma_derivative = [rc, n, d](const Vec& xi, int k, Mat& out) {
    out = Mat::Zero(n, d);
    for (int l = 0; l < RandomCoefficients::kModes; ++l) {
      out += rc->scale * std::cos(rc->freq[l].dot(xi) + rc->phase[l]) *
             rc->freq[l](k) * rc->amp[l];
    }
  };
  cb.drift = [rc, n](double eps, const Vec& xi, Vec& out) {
    out.resize(n);
    for (int i = 0; i < n; ++i) {
      out(i) = rc->scale * rc->c(i) * std::sin(rc->v.row(i).dot(xi) + rc->q(i)) +
               eps * rc->beta(i);
    }
  };
  cb.drift_jacobian = [rc, n](double, const Vec& xi, Mat& out) {
    out.resize(n, n);
    for (int i = 0; i < n; ++i) {
      const double g =
          rc->scale * rc->c(i) * std::cos(rc->v.row(i).dot(xi) + rc->q(i));
      for (int k = 0; k < n; ++k) out(i, k) = g * rc->v(i, k);
    }
  };
  cb.drift_eps = [rc](double, const Vec&, Vec& out) { out = rc->beta; };
  return VectorFieldSystem(name, n, d, std::move(cb));
}

std::shared_ptr<RandomCoefficients> draw_random(int n, int d, std::uint64_t seed,
                                                std::uint64_t attempt,
                                                double scale) {
  RandomStream rng(seed, attempt);
  auto rc = std::make_shared<RandomCoefficients>();
  rc->n = n;
  rc->d = d;
  rc->scale = scale;
  rc->a0 = Mat::Zero(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      rc->a0(i, j) = (i == j ? 1.0 : 0.0) + 0.2 * rng.normal();
    }
  }
  for (int l = 0; l < RandomCoefficients::kModes; ++l) {
    rc->amp[l] = Mat(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) rc->amp[l](i, j) = rng.normal();
    }
    rc->freq[l] = Vec(n);
    for (int i = 0; i < n; ++i) rc->freq[l](i) = rng.normal();
    rc->phase[l] = 2.0 * M_PI * rng.uniform();
  }
  rc->c = Vec(n);
  rc->beta = Vec(n);
  rc->q = Vec(n);
  rc->v = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    rc->c(i) = rng.normal();
    rc->beta(i) = 0.5 * rng.normal();
    rc->q(i) = 2.0 * M_PI * rng.uniform();
    for (int k = 0; k < n; ++k) rc->v(i, k) = rng.normal();
  }
  return rc;
}

}  // namespace

VectorFieldSystem random_system(int n, int d, std::uint64_t seed, double scale) {
  if (n < 1 || d < n || d > kMaxDim) {
    throw ValidationError("random_system: need 1 <= n <= d <= 8");
  }
  if (!(scale >= 0.0)) throw ValidationError("random_system: scale must be >= 0");
  const Vec origin = Vec::Zero(n);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    auto rc = draw_random(n, d, seed, attempt, scale);
    VectorFieldSystem sys = build_random(rc, "random");
    if (sys.ellipticity(origin) > 0.05) return sys;
  }
  throw NumericalError("random_system: no elliptic draw in 64 attempts");
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"additive", "linear1d",
                                                 "rotating2d", "random", "null"};
  return names;
}

CatalogSystem make_system(const std::string& name, const SystemParams& params) {
  ParamReader p(name, params);
  if (name == "additive" || name == "null") {
    const int dim = p.get_int("dim", 1);
    if (dim < 1 || dim > kMaxDim) {
      throw ValidationError("system '" + name + "': dim must lie in [1, 8]");
    }
    VectorFieldSystem sys = name == "additive" ? make_additive(dim) : make_null(dim);
    Vec a = p.endpoint("a", Vec::Zero(dim));
    Vec ap = p.endpoint("ap", Vec::Ones(dim));
    p.reject_unused();
    return {std::move(sys), a, ap};
  }
  if (name == "linear1d") {
    const double s = p.get("s", 1.0);
    const double r = p.get("r", 0.0);
    Vec a = p.endpoint("a", Vec::Ones(1));
    Vec ap = p.endpoint("ap", Vec::Constant(1, std::exp(1.0)));
    p.reject_unused();
    return {make_linear1d(s, r), a, ap};
  }
  if (name == "rotating2d") {
    const double kappa = p.get("kappa", 0.5);
    const double gamma = p.get("gamma", 0.2);
    const double beta1 = p.get("beta1", 0.3);
    const double beta2 = p.get("beta2", -0.1);
    Vec a = p.endpoint("a", Vec::Zero(2));
    Vec def(2);
    def << 1.0, 0.5;
    Vec ap = p.endpoint("ap", def);
    p.reject_unused();
    return {make_rotating2d(kappa, gamma, beta1, beta2), a, ap};
  }
  if (name == "random") {
    const int n = p.get_int("n", 2);
    const int d = p.get_int("d", n);
    const double seed = p.get("seed", 1.0);
    const double scale = p.get("scale", 0.3);
    if (seed < 0 || seed != std::floor(seed)) {
      throw ValidationError("system 'random': seed must be a nonnegative integer");
    }
    Vec a = p.endpoint("a", Vec::Zero(n));
    Vec ap = p.endpoint("ap", Vec::Constant(n, 0.5));
    p.reject_unused();
    return {random_system(n, d, static_cast<std::uint64_t>(seed), scale), a, ap};
  }
  throw ValidationError("unknown system '" + name +
                        "' (known: additive, linear1d, rotating2d, random, null)");
}

}  // namespace roughldp

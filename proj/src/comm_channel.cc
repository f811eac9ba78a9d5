// Copyright 2026 The cfisac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfisac/comm_channel.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cfisac/grid.h"

namespace cfisac {
namespace {

using std::numbers::pi;

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
  Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().adjoint();
}

std::complex<double> complex_normal(RngStream& rng) {
  const double re = half_normal_component(rng);
  const double im = half_normal_component(rng);
  return {re, im};
}

}  // namespace

void CommModelParams::validate() const {
  if (!(d_corr_m > 0.0))
    throw std::invalid_argument("comm model: d_corr_m must be positive");
  if (n_fade_samples_per_rb < 1)
    throw std::invalid_argument("comm model: n_fade_samples_per_rb must be >= 1");
  if (rician_k_std_db < 0.0 || asd_std_log < 0.0 || shadow_std_los_db < 0.0 ||
      shadow_std_nlos_db < 0.0)
    throw std::invalid_argument("comm model: standard deviations must be >= 0");
}

ArrayGeometry ArrayGeometry::half_wavelength_uca(int m_antennas,
                                                 double elevation_cos) {
  // Circumference M * lambda / 2.
  return {m_antennas, m_antennas / (4.0 * pi), elevation_cos};
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double azimuth) {
  Eigen::VectorXcd a(geom.m_antennas);
  const double kr = 2.0 * pi * geom.radius_wavelengths * geom.elevation_cos;
  for (int m = 0; m < geom.m_antennas; ++m) {
    const double phase =
        kr * std::cos(azimuth - 2.0 * pi * m / geom.m_antennas);
    a(m) = std::polar(1.0, phase);
  }
  return a;
}

double los_probability(double d2d_m) {
  if (d2d_m <= 18.0) return 1.0;
  return 18.0 / d2d_m + std::exp(-d2d_m / 36.0) * (1.0 - 18.0 / d2d_m);
}

double pathloss_los_db(double d3d_m, double carrier_hz) {
  const double f_ghz = carrier_hz / 1e9;
  return 32.4 + 21.0 * std::log10(d3d_m) + 20.0 * std::log10(f_ghz);
}

double pathloss_nlos_db(double d3d_m, double carrier_hz) {
  const double f_ghz = carrier_hz / 1e9;
  const double nlos =
      35.3 * std::log10(d3d_m) + 22.4 + 21.3 * std::log10(f_ghz);
  return std::max(pathloss_los_db(d3d_m, carrier_hz), nlos);
}

std::vector<double> correlated_shadowing(std::span<const Point3> ue_positions,
                                         std::span<const double> sigma_db,
                                         double d_corr_m, RngStream& rng) {
  const std::size_t n = ue_positions.size();
  if (n == 0) throw std::invalid_argument("correlated_shadowing: no UEs");
  if (sigma_db.size() != n)
    throw std::invalid_argument("correlated_shadowing: sigma size mismatch");

  Eigen::MatrixXd cov(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double d = distance_2d(ue_positions[j], ue_positions[k]);
      cov(j, k) = sigma_db[j] * sigma_db[k] * std::exp(-d / d_corr_m);
    }
  }

  // Eigen-factorization tolerates the rank deficiency of co-located UEs.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-9 * scale)
    throw ModelError("shadowing covariance is not positive semi-definite");
  const Eigen::MatrixXd factor =
      eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (std::size_t j = 0; j < n; ++j) z(j) = normal(rng);
  const Eigen::VectorXd psi = factor * z;
  return {psi.data(), psi.data() + n};
}

Eigen::MatrixXcd laplacian_pas_correlation(double mu_phi, double sigma_phi,
                                           const ArrayGeometry& geom) {
  if (!(sigma_phi > 0.0))
    throw std::invalid_argument("laplacian_pas_correlation: sigma_phi <= 0");

  // a_m a_q^* = exp(j z sin(phi - psi)) with z = 2 kr sin((th_m - th_q) / 2)
  // and psi = (th_m + th_q) / 2. Expanding in Bessel functions leaves the
  // Fourier coefficients of the PAS, which are closed form for a Laplacian
  // truncated to [-pi, pi).
  const int m = geom.m_antennas;
  const double kr = 2.0 * pi * geom.radius_wavelengths * geom.elevation_cos;
  const double c = std::sqrt(2.0) / sigma_phi;
  const double tail = std::exp(-c * pi);
  // J_n(z) is below 1e-20 once n exceeds |z| <= 2 kr by 30.
  const int order = static_cast<int>(std::ceil(2.0 * std::abs(kr))) + 30;

  std::vector<double> fourier(order + 1);
  for (int n = 0; n <= order; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    fourier[n] = c * c * (1.0 - sign * tail) /
                 ((c * c + static_cast<double>(n) * n) * (1.0 - tail));
  }

  // Bessel values per index difference d = (m - q) mod M.
  std::vector<double> bessel(static_cast<std::size_t>(m) * (order + 1));
  for (int d = 0; d < m; ++d) {
    const double z = std::abs(2.0 * kr * std::sin(pi * d / m));
    for (int n = 0; n <= order; ++n)
      bessel[d * (order + 1) + n] = std::cyl_bessel_j(static_cast<double>(n), z);
  }

  Eigen::MatrixXcd r(m, m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double z = 2.0 * kr * std::sin(pi * (p - q) / m);
      const int d = ((p - q) % m + m) % m;
      const double beta = mu_phi - pi * (p + q) / m;
      const double* jn = &bessel[d * (order + 1)];
      double re = jn[0];
      double im = 0.0;
      for (int n = 1; n <= order; ++n) {
        // J_n(-z) = (-1)^n J_n(z).
        const double term = 2.0 * fourier[n] * ((n % 2 == 1 && z < 0.0) ? -jn[n] : jn[n]);
        if (n % 2 == 0)
          re += term * std::cos(n * beta);
        else
          im += term * std::sin(n * beta);
      }
      r(p, q) = {re, im};
    }
  }
  // Exact Hermitian symmetry.
  return 0.5 * (r + r.adjoint());
}

std::vector<Eigen::VectorXcd> realize_channel(const LinkModel& link,
                                              int n_samples, RngStream& rng) {
  const Eigen::Index m = link.los_steering.size();
  const double amp = std::sqrt(link.large_scale_gain);
  const double los_w = std::sqrt(link.k_factor / (link.k_factor + 1.0));
  const double nlos_w = std::sqrt(1.0 / (link.k_factor + 1.0));
  const double noise_sd = std::sqrt(link.est_noise_var);

  std::uniform_real_distribution<double> phase(-pi, pi);
  const std::complex<double> los_phase = std::polar(1.0, phase(rng));

  std::vector<Eigen::VectorXcd> out;
  out.reserve(n_samples);
  Eigen::VectorXcd w(m);
  for (int s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) w(i) = complex_normal(rng);
    Eigen::VectorXcd h = amp * (los_w * los_phase * link.los_steering +
                                nlos_w * (link.corr_sqrt * w));
    for (Eigen::Index i = 0; i < m; ++i) h(i) += noise_sd * complex_normal(rng);
    out.push_back(std::move(h));
  }
  return out;
}

double rb_average_gain(std::span<const Eigen::VectorXcd> samples) {
  if (samples.empty())
    throw std::invalid_argument("rb_average_gain: empty sample set");
  double sum = 0.0;
  for (const auto& h : samples) sum += h.squaredNorm();
  return sum / static_cast<double>(samples.size());
}

double rb_average_correlation(std::span<const Eigen::VectorXcd> samples_u,
                              std::span<const Eigen::VectorXcd> samples_v) {
  if (samples_u.empty() || samples_u.size() != samples_v.size())
    throw std::invalid_argument("rb_average_correlation: sample count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < samples_u.size(); ++i) {
    const double nu = samples_u[i].squaredNorm();
    const double nv = samples_v[i].squaredNorm();
    if (!(nu > 0.0) || !(nv > 0.0))
      throw std::invalid_argument("rb_average_correlation: zero-norm channel");
    const double inner = std::norm(samples_u[i].dot(samples_v[i]));
    sum += std::min(1.0, inner / (nu * nv));
  }
  return sum / static_cast<double>(samples_u.size());
}

std::vector<std::vector<LinkModel>> build_link_models(
    const Scenario& scenario, const ScenarioConfig& cfg,
    const CommModelParams& params, RngStream& rng) {
  params.validate();
  const int n_ap = scenario.n_ap();
  const int n_cu = scenario.n_cu();
  std::vector<std::vector<LinkModel>> links(n_ap, std::vector<LinkModel>(n_cu));
  if (n_cu == 0) return links;

  std::normal_distribution<double> k_db(params.rician_k_mean_db,
                                        params.rician_k_std_db);
  std::normal_distribution<double> asd_log(params.asd_mean_log,
                                           params.asd_std_log);
  for (int a = 0; a < n_ap; ++a) {
    const Point3& ap = scenario.ap_positions[a];
    std::vector<double> sigma(n_cu);
    for (int u = 0; u < n_cu; ++u) {
      const double d2d = distance_2d(ap, scenario.ue_positions[u]);
      links[a][u].los =
          std::bernoulli_distribution(los_probability(d2d))(rng);
      sigma[u] = links[a][u].los ? params.shadow_std_los_db
                                 : params.shadow_std_nlos_db;
    }
    const std::vector<double> shadow = correlated_shadowing(
        scenario.ue_positions, sigma, params.d_corr_m, rng);

    for (int u = 0; u < n_cu; ++u) {
      LinkModel& link = links[a][u];
      const Point3& ue = scenario.ue_positions[u];
      const double d2d = std::max(distance_2d(ap, ue), 1e-3);
      const double d3d = std::max(distance_3d(ap, ue), 1.0);
      const double pl = link.los ? pathloss_los_db(d3d, cfg.carrier_hz)
                                 : pathloss_nlos_db(d3d, cfg.carrier_hz);
      link.large_scale_gain = std::pow(10.0, (-pl + shadow[u]) / 10.0);
      link.k_factor = link.los ? std::pow(10.0, k_db(rng) / 10.0) : 0.0;

      const double spread_deg =
          std::min(std::pow(10.0, asd_log(rng)), params.asd_max_deg);
      const double mu = std::atan2(ue.y - ap.y, ue.x - ap.x);
      const ArrayGeometry geom =
          ArrayGeometry::half_wavelength_uca(cfg.m_antennas, d2d / d3d);
      link.los_steering = steering_vector(geom, mu);
      link.corr_sqrt = hermitian_sqrt(laplacian_pas_correlation(
          mu, spread_deg * pi / 180.0, geom));
      link.est_noise_var =
          cfg.est_noise_var
              ? *cfg.est_noise_var
              : link.large_scale_gain *
                    std::pow(10.0, params.est_error_rel_db / 10.0);
    }
  }
  return links;
}

CommStats build_comm_stats(const Scenario& scenario, const ScenarioConfig& cfg,
                           const CommModelParams& params, RngStream& rng) {
  const int n_ap = scenario.n_ap();
  const int n_cu = scenario.n_cu();
  const auto links = build_link_models(scenario, cfg, params, rng);

  CommStats stats;
  stats.gains = Eigen::MatrixXd::Zero(n_ap, n_cu);
  stats.correlations.assign(n_ap, Eigen::MatrixXd::Identity(n_cu, n_cu));
  for (int a = 0; a < n_ap; ++a) {
    std::vector<std::vector<Eigen::VectorXcd>> samples(n_cu);
    for (int u = 0; u < n_cu; ++u) {
      samples[u] =
          realize_channel(links[a][u], params.n_fade_samples_per_rb, rng);
      stats.gains(a, u) = rb_average_gain(samples[u]);
    }
    for (int u = 0; u < n_cu; ++u) {
      for (int v = u + 1; v < n_cu; ++v) {
        const double rho = rb_average_correlation(samples[u], samples[v]);
        stats.correlations[a](u, v) = rho;
        stats.correlations[a](v, u) = rho;
      }
    }
  }
  return stats;
}

}  // namespace cfisac

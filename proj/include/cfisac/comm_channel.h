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

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cfisac/rng.h"
#include "cfisac/scenario.h"

namespace cfisac {

// Large-scale and angular parameters of the urban-micro street-canyon link
// model. Shadowing and Rician K are drawn per link; the azimuth spread is
// lognormal: sigma_phi[deg] = 10^N(asd_mean_log, asd_std_log).
struct CommModelParams {
  double d_corr_m = 50.0;
  int n_fade_samples_per_rb = 8;
  double rician_k_mean_db = 9.0;
  double rician_k_std_db = 5.0;
  double asd_mean_log = 1.18;
  double asd_std_log = 0.41;
  double asd_max_deg = 104.0;
  double shadow_std_los_db = 4.0;
  double shadow_std_nlos_db = 7.82;
  // Estimation error power relative to the link's mean channel power, used
  // when the scenario does not set an absolute variance.
  double est_error_rel_db = -10.0;

  void validate() const;
};

// Per-RB statistics reported by every AP: average gains g[a](u) and the
// RB-averaged user-pair correlation matrices correlations[a](u, u').
struct CommStats {
  Eigen::MatrixXd gains;                      // n_ap x n_cu
  std::vector<Eigen::MatrixXd> correlations;  // n_ap of n_cu x n_cu

  int n_ap() const { return static_cast<int>(gains.rows()); }
  int n_cu() const { return static_cast<int>(gains.cols()); }
};

// Uniform circular array seen at a fixed elevation: the array response for
// azimuth phi is exp(j 2 pi (radius/lambda) cos(elev) cos(phi - 2 pi m / M)).
struct ArrayGeometry {
  int m_antennas = 16;
  double radius_wavelengths = 0.0;
  double elevation_cos = 1.0;

  // Half-wavelength spacing along the circumference.
  static ArrayGeometry half_wavelength_uca(int m_antennas,
                                           double elevation_cos = 1.0);
};

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double azimuth);

// UMi street-canyon LoS probability for a 2-D distance in meters.
double los_probability(double d2d_m);
// UMi path loss in dB for the given 3-D distance and carrier.
double pathloss_los_db(double d3d_m, double carrier_hz);
double pathloss_nlos_db(double d3d_m, double carrier_hz);

// Jointly Gaussian shadowing (dB) for the UEs seen from one AP, with
// cov(j, k) = sigma_j sigma_k exp(-d_jk / d_corr). Throws ModelError if the
// covariance is not positive semi-definite after jitter.
std::vector<double> correlated_shadowing(std::span<const Point3> ue_positions,
                                         std::span<const double> sigma_db,
                                         double d_corr_m, RngStream& rng);

// Spatial correlation matrix of a Laplacian power angular spectrum centered
// at mu_phi with spread sigma_phi (radians), truncated to [-pi, pi) around
// its center. Evaluated in closed form through the Jacobi-Anger expansion
// of the UCA response, so trace(R) = M and there is no grid error.
Eigen::MatrixXcd laplacian_pas_correlation(double mu_phi, double sigma_phi,
                                           const ArrayGeometry& geom);

// Everything needed to draw small-scale realizations of one AP-UE link.
struct LinkModel {
  double large_scale_gain = 0.0;  // pathloss x shadowing, linear
  double k_factor = 0.0;          // Rician K, linear; 0 for NLoS
  Eigen::VectorXcd los_steering;
  Eigen::MatrixXcd corr_sqrt;  // Hermitian square root of R
  double est_noise_var = 0.0;
  bool los = false;
};

// Draws n_samples independent estimated channel vectors of the link.
// Each is sqrt(beta) (sqrt(K/(K+1)) a e^{j psi} + sqrt(1/(K+1)) R^{1/2} w)
// plus CN(0, est_noise_var I); psi is drawn once per call (one RB).
std::vector<Eigen::VectorXcd> realize_channel(const LinkModel& link,
                                              int n_samples, RngStream& rng);

// Mean of ||h||^2 over the samples of one RB.
double rb_average_gain(std::span<const Eigen::VectorXcd> samples);

// Mean over REs of |h_u^H h_v|^2 / (||h_u||^2 ||h_v||^2).
double rb_average_correlation(std::span<const Eigen::VectorXcd> samples_u,
                              std::span<const Eigen::VectorXcd> samples_v);

// Builds the link models of every (AP, UE) pair: LoS state, correlated
// shadowing per AP, K factor, azimuth spread and PAS correlation.
std::vector<std::vector<LinkModel>> build_link_models(
    const Scenario& scenario, const ScenarioConfig& cfg,
    const CommModelParams& params, RngStream& rng);

CommStats build_comm_stats(const Scenario& scenario, const ScenarioConfig& cfg,
                           const CommModelParams& params, RngStream& rng);

}  // namespace cfisac

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

#include "cfisac/sens_channel.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cfisac/comm_channel.h"

namespace cfisac {

void SensModelParams::validate() const {
  if (!(w_los >= w_nlos && w_nlos >= 0.0))
    throw std::invalid_argument("sens model: need w_los >= w_nlos >= 0");
}

double sigma_aspect_db(const TargetClass& tc, double velocity) {
  if (velocity < 0.0)
    throw std::invalid_argument("sigma_aspect_db: negative velocity");
  const double frac = std::log10(1.0 + velocity / tc.v_ref_mps) /
                      std::log10(1.0 + tc.v_max_mps / tc.v_ref_mps);
  return tc.sigma_asp_min_db + (tc.sigma_asp_max_db - tc.sigma_asp_min_db) * frac;
}

double rcs_realization(const TargetClass& tc, double velocity, RngStream& rng) {
  const double sd = sigma_aspect_db(tc, velocity);
  std::normal_distribution<double> aspect(0.0, 1.0);
  return tc.mean_rcs_dbsm + sd * aspect(rng);
}

double los_weight(double p_los, const SensModelParams& params) {
  return params.w_nlos + (params.w_los - params.w_nlos) * p_los;
}

double bistatic_gain(double d_tx_t, double d_t_rx, double rcs_tx_dbsm,
                     double rcs_rx_dbsm, double p_los_tx, double p_los_rx,
                     const SensModelParams& params, double carrier_hz) {
  if (!(d_tx_t > 0.0) || !(d_t_rx > 0.0))
    throw std::invalid_argument("bistatic_gain: distances must be positive");
  constexpr double kSpeedOfLight = 299792458.0;
  const double lambda_w = kSpeedOfLight / carrier_hz;
  const double g_tx = std::pow(10.0, params.g_tx_dbi / 10.0);
  const double g_rx = std::pow(10.0, params.g_rx_dbi / 10.0);
  const double four_pi = 4.0 * std::numbers::pi;
  const double budget =
      g_tx * g_rx * lambda_w * lambda_w / (four_pi * four_pi * four_pi);
  const double rcs_m2 = 0.5 * (std::pow(10.0, rcs_tx_dbsm / 10.0) +
                               std::pow(10.0, rcs_rx_dbsm / 10.0));
  return budget / (d_tx_t * d_tx_t * d_t_rx * d_t_rx) * rcs_m2 *
         los_weight(p_los_tx, params) * los_weight(p_los_rx, params);
}

SensStats build_sens_stats(const Scenario& scenario, const ScenarioConfig& cfg,
                           const SensModelParams& params, RngStream& rng) {
  params.validate();
  const int n_ap = scenario.n_ap();
  const int n_tg = scenario.n_tg();
  SensStats st;
  st.gains = Grid3<double>(n_ap, n_tg, n_ap);
  st.distances = Grid<double>(n_ap, n_tg);
  st.rcs_dbsm = Grid<double>(n_ap, n_tg);
  st.los_prob = Grid<double>(n_ap, n_tg);

  for (int t = 0; t < n_tg; ++t) {
    for (int a = 0; a < n_ap; ++a) {
      const Point3& ap = scenario.ap_positions[a];
      const Point3& tg = scenario.tg_positions[t];
      // Heights differ, so the 3-D distance is strictly positive.
      st.distances(a, t) = std::max(distance_3d(ap, tg), 1e-3);
      st.los_prob(a, t) = los_probability(distance_2d(ap, tg));
      st.rcs_dbsm(a, t) = rcs_realization(scenario.tg_classes[t],
                                          scenario.tg_velocities[t], rng);
    }
  }
  for (int at = 0; at < n_ap; ++at) {
    for (int t = 0; t < n_tg; ++t) {
      for (int ar = 0; ar < n_ap; ++ar) {
        st.gains(at, t, ar) = bistatic_gain(
            st.distances(at, t), st.distances(ar, t), st.rcs_dbsm(at, t),
            st.rcs_dbsm(ar, t), st.los_prob(at, t), st.los_prob(ar, t), params,
            cfg.carrier_hz);
      }
    }
  }
  return st;
}

}  // namespace cfisac

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

#include "cfisac/scenario.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cfisac {
namespace {

constexpr double kSpeedOfLight = 299792458.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid scenario config: " + what);
}

}  // namespace

double distance_3d(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

double distance_2d(const Point3& a, const Point3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void TargetClass::validate() const {
  if (!(sigma_asp_min_db <= sigma_asp_max_db))
    throw std::invalid_argument("target class: sigma_asp_min > sigma_asp_max");
  if (!(v_ref_mps > 0.0))
    throw std::invalid_argument("target class: v_ref must be positive");
  if (!(v_max_mps > v_ref_mps))
    throw std::invalid_argument("target class: v_max must exceed v_ref");
}

double ScenarioConfig::wavelength_m() const { return kSpeedOfLight / carrier_hz; }

void ScenarioConfig::validate() const {
  require(n_ap >= 1, "n_ap must be >= 1");
  require(n_cu >= 1, "n_cu must be >= 1");
  require(n_tg >= 1, "n_tg must be >= 1");
  require(n_rf_per_ap >= 1, "n_rf_per_ap must be >= 1");
  require(m_antennas >= 1, "m_antennas must be >= 1");
  require(n_rf_per_ap <= m_antennas, "n_rf_per_ap must not exceed m_antennas");
  require(rb_subcarriers >= 1 && rb_symbols >= 1, "RB dimensions must be >= 1");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(ap_circle_radius_m >= 0.0, "ap_circle_radius_m must be >= 0");
  require(area_side_m > 0.0, "area_side_m must be positive");
  require(lambda_min > 0.0, "lambda_min must be positive");
  require(lambda_min <= lambda_max, "lambda_min must not exceed lambda_max");
  require(!est_noise_var || *est_noise_var >= 0.0,
          "est_noise_var must be >= 0");
  require(tg_speed_max_mps >= 0.0, "tg_speed_max_mps must be >= 0");
  require(rcs_mean_min_dbsm <= rcs_mean_max_dbsm, "RCS mean range inverted");
  TargetClass{0.0, sigma_asp_min_db, sigma_asp_max_db, v_ref_mps, v_max_mps}
      .validate();
}

Scenario generate_scenario(const ScenarioConfig& cfg,
                           std::uint64_t instance_id) {
  cfg.validate();
  Scenario sc;
  sc.seed = stream_seed(cfg.master_seed, instance_id, "instance");

  sc.ap_positions.reserve(cfg.n_ap);
  for (int a = 0; a < cfg.n_ap; ++a) {
    const double angle = 2.0 * std::numbers::pi * a / cfg.n_ap;
    sc.ap_positions.push_back({cfg.ap_circle_radius_m * std::cos(angle),
                               cfg.ap_circle_radius_m * std::sin(angle),
                               cfg.ap_height_m});
  }

  const double half = 0.5 * cfg.area_side_m;
  std::uniform_real_distribution<double> coord(-half, half);
  RngStream geom = derive_stream(cfg.master_seed, instance_id, "geom");
  for (int u = 0; u < cfg.n_cu; ++u) {
    const double x = coord(geom);
    const double y = coord(geom);
    sc.ue_positions.push_back({x, y, cfg.ue_height_m});
  }
  for (int t = 0; t < cfg.n_tg; ++t) {
    const double x = coord(geom);
    const double y = coord(geom);
    sc.tg_positions.push_back({x, y, cfg.tg_height_m});
  }

  RngStream mobility = derive_stream(cfg.master_seed, instance_id, "mobility");
  std::uniform_real_distribution<double> speed(0.0, cfg.tg_speed_max_mps);
  for (int t = 0; t < cfg.n_tg; ++t) sc.tg_velocities.push_back(speed(mobility));

  RngStream rcs = derive_stream(cfg.master_seed, instance_id, "rcs-class");
  std::uniform_real_distribution<double> rcs_mean(cfg.rcs_mean_min_dbsm,
                                                  cfg.rcs_mean_max_dbsm);
  for (int t = 0; t < cfg.n_tg; ++t) {
    sc.tg_classes.push_back({rcs_mean(rcs), cfg.sigma_asp_min_db,
                             cfg.sigma_asp_max_db, cfg.v_ref_mps,
                             cfg.v_max_mps});
  }

  RngStream priority = derive_stream(cfg.master_seed, instance_id, "priority");
  std::uniform_real_distribution<double> lambda(cfg.lambda_min, cfg.lambda_max);
  for (int u = 0; u < cfg.n_cu; ++u) sc.lambda_cu.push_back(lambda(priority));
  for (int t = 0; t < cfg.n_tg; ++t) sc.lambda_tg.push_back(lambda(priority));

  RngStream trade = derive_stream(cfg.master_seed, instance_id, "alpha");
  sc.alpha = std::uniform_real_distribution<double>(0.0, 1.0)(trade);
  return sc;
}

double draw_dataset_lambda_max(std::uint64_t master_seed) {
  RngStream rng = derive_stream(master_seed, 0, "dataset-lambda-max");
  return std::bernoulli_distribution(0.5)(rng) ? 10.0 : 5.0;
}

}  // namespace cfisac

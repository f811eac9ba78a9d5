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

#include <cstdint>
#include <optional>
#include <vector>

#include "cfisac/rng.h"

namespace cfisac {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Point3&) const = default;
};

double distance_3d(const Point3& a, const Point3& b);
double distance_2d(const Point3& a, const Point3& b);

// Radar signature statistics of one target class. The aspect-angle spread
// grows logarithmically with speed between sigma_asp_min_db (at rest) and
// sigma_asp_max_db (at v_max_mps).
struct TargetClass {
  double mean_rcs_dbsm = 15.0;
  double sigma_asp_min_db = 1.0;
  double sigma_asp_max_db = 3.0;
  double v_ref_mps = 1.0;
  double v_max_mps = 30.0;

  void validate() const;
  bool operator==(const TargetClass&) const = default;
};

struct ScenarioConfig {
  int n_ap = 8;
  int n_cu = 10;
  int n_tg = 4;
  int n_rf_per_ap = 4;
  int m_antennas = 16;
  double carrier_hz = 3.0e9;
  int rb_subcarriers = 12;
  int rb_symbols = 14;
  double ap_circle_radius_m = 350.0;
  double area_side_m = 1000.0;
  double ap_height_m = 10.0;
  double ue_height_m = 1.5;
  double tg_height_m = 1.5;
  std::uint64_t master_seed = 1;
  // Absolute channel-estimation error variance. When unset the error is
  // placed relative to each link's mean power (CommModelParams).
  std::optional<double> est_noise_var;
  double lambda_min = 0.5;
  double lambda_max = 10.0;
  double tg_speed_max_mps = 10.0;
  double rcs_mean_min_dbsm = 10.0;
  double rcs_mean_max_dbsm = 20.0;
  double sigma_asp_min_db = 1.0;
  double sigma_asp_max_db = 3.0;
  double v_ref_mps = 1.0;
  double v_max_mps = 30.0;

  double wavelength_m() const;
  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct Scenario {
  std::vector<Point3> ap_positions;
  std::vector<Point3> ue_positions;
  std::vector<Point3> tg_positions;
  std::vector<double> tg_velocities;
  std::vector<TargetClass> tg_classes;
  std::vector<double> lambda_cu;
  std::vector<double> lambda_tg;
  double alpha = 0.5;
  std::uint64_t seed = 0;

  int n_ap() const { return static_cast<int>(ap_positions.size()); }
  int n_cu() const { return static_cast<int>(ue_positions.size()); }
  int n_tg() const { return static_cast<int>(tg_positions.size()); }

  bool operator==(const Scenario&) const = default;
};

// Places APs on the configured circle at equal angular spacing starting at
// angle 0, draws UEs and targets uniformly in the centered square, target
// speeds uniformly in [0, tg_speed_max], per-target mean RCS uniformly in
// [rcs_mean_min, rcs_mean_max], priority weights uniformly in
// [lambda_min, lambda_max] and alpha uniformly in [0, 1]. Each quantity uses
// its own derived stream so the result depends only on
// (cfg.master_seed, instance_id).
Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t instance_id);

// Per-dataset choice of the upper priority bound: 5 or 10 with equal
// probability, derived from the master seed.
double draw_dataset_lambda_max(std::uint64_t master_seed);

}  // namespace cfisac

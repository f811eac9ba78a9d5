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

#include "cfisac/grid.h"
#include "cfisac/rng.h"
#include "cfisac/scenario.h"

namespace cfisac {

struct SensModelParams {
  double g_tx_dbi = 0.0;
  double g_rx_dbi = 0.0;
  double w_los = 1.0;
  double w_nlos = 0.1;

  void validate() const;
};

// gains(a_t, t, a_r) is the bistatic quality indicator of the link
// a_t -> t -> a_r. Entries with a_t == a_r are stored but can never be used
// by a half-duplex solution.
struct SensStats {
  Grid3<double> gains;     // n_ap x n_tg x n_ap
  Grid<double> distances;  // n_ap x n_tg, meters
  Grid<double> rcs_dbsm;   // n_ap x n_tg
  Grid<double> los_prob;   // n_ap x n_tg
};

// Aspect-angle standard deviation (dB) of a target moving at `velocity`.
double sigma_aspect_db(const TargetClass& target_class, double velocity);

// One RCS realization in dBsm: class mean plus N(0, sigma_aspect_db^2).
double rcs_realization(const TargetClass& target_class, double velocity,
                       RngStream& rng);

double los_weight(double p_los, const SensModelParams& params);

// Radar-equation style gain of the a_t -> target -> a_r path. RCS values are
// averaged in linear scale (m^2). Throws std::invalid_argument for a
// nonpositive distance.
double bistatic_gain(double d_tx_t, double d_t_rx, double rcs_tx_dbsm,
                     double rcs_rx_dbsm, double p_los_tx, double p_los_rx,
                     const SensModelParams& params, double carrier_hz);

SensStats build_sens_stats(const Scenario& scenario, const ScenarioConfig& cfg,
                           const SensModelParams& params, RngStream& rng);

}  // namespace cfisac

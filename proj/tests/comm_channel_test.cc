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

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cfisac/comm_channel.h"

namespace cfisac {
namespace {

using std::numbers::pi;

// Composite Simpson rule on each side of the Laplacian peak, in the offset
// variable theta = phi - mu over [-pi, pi].
Eigen::MatrixXcd pas_quadrature(double mu, double sigma, const ArrayGeometry& g,
                                int intervals_per_side) {
  const int m = g.m_antennas;
  const double kr = 2.0 * pi * g.radius_wavelengths * g.elevation_cos;
  const double h = pi / intervals_per_side;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
  double norm = 0.0;
  for (int side : {-1, 1}) {
    for (int i = 0; i <= intervals_per_side; ++i) {
      const double theta = side * i * h;
      const double simpson =
          (i == 0 || i == intervals_per_side) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double w = simpson * std::exp(-std::sqrt(2.0) * std::abs(theta) / sigma);
      Eigen::VectorXcd a(m);
      for (int k = 0; k < m; ++k)
        a(k) = std::polar(1.0, kr * std::cos(mu + theta - 2.0 * pi * k / m));
      acc += w * a * a.adjoint();
      norm += w;
    }
  }
  return acc / norm;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Eigen::VectorXcd random_vector(int m, RngStream& rng) {
  Eigen::VectorXcd v(m);
  for (int i = 0; i < m; ++i)
    v(i) = {half_normal_component(rng), half_normal_component(rng)};
  return v;
}

TEST(LosProbability, ShortRangeIsCertain) {
  EXPECT_EQ(los_probability(10.0), 1.0);
  EXPECT_EQ(los_probability(18.0), 1.0);
}

TEST(LosProbability, MatchesHandEvaluation) {
  EXPECT_NEAR(los_probability(36.0), 0.5 + 0.5 * std::exp(-1.0), 1e-15);
  double prev = 1.0;
  for (double d = 18.0; d < 2000.0; d += 7.0) {
    const double p = los_probability(d);
    EXPECT_LE(p, prev + 1e-15);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(PathLoss, MatchesHandEvaluation) {
  EXPECT_NEAR(pathloss_los_db(100.0, 3e9), 32.4 + 42.0 + 20.0 * std::log10(3.0), 1e-12);
  EXPECT_NEAR(pathloss_nlos_db(100.0, 3e9), 35.3 * 2.0 + 22.4 + 21.3 * std::log10(3.0),
              1e-12);
  // Very short links fall back to the LoS value.
  EXPECT_DOUBLE_EQ(pathloss_nlos_db(1.0, 3e9), pathloss_los_db(1.0, 3e9));
}

TEST(Shadowing, CrossCorrelationFollowsExponentialDecay) {
  const std::vector<Point3> ues = {{0, 0, 1.5}, {10, 0, 1.5}, {50, 0, 1.5}, {150, 0, 1.5}};
  const std::vector<double> sigma(4, 7.82);
  RngStream rng = derive_stream(11, 0, "shadowing-test");
  std::vector<std::vector<double>> draws(4);
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> psi = correlated_shadowing(ues, sigma, 50.0, rng);
    for (int k = 0; k < 4; ++k) draws[k].push_back(psi[k]);
  }
  for (int k = 1; k < 4; ++k)
    EXPECT_NEAR(pearson(draws[0], draws[k]), std::exp(-ues[k].x / 50.0), 0.03);
}

TEST(Shadowing, SingleUeHasConfiguredVariance) {
  const std::vector<Point3> ue = {{3, 4, 1.5}};
  const std::vector<double> sigma = {4.0};
  RngStream rng = derive_stream(12, 0, "shadowing-test");
  double sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = correlated_shadowing(ue, sigma, 50.0, rng)[0];
    sum2 += v * v;
  }
  EXPECT_NEAR(std::sqrt(sum2 / n), 4.0, 0.05);
}

TEST(Shadowing, CoLocatedUesShareTheirDraw) {
  const std::vector<Point3> ues = {{7, 7, 1.5}, {7, 7, 1.5}};
  const std::vector<double> sigma = {4.0, 4.0};
  RngStream rng = derive_stream(13, 0, "shadowing-test");
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> psi = correlated_shadowing(ues, sigma, 50.0, rng);
    EXPECT_NEAR(psi[0], psi[1], 1e-9);
  }
}

TEST(Shadowing, RejectsBadInput) {
  RngStream rng = derive_stream(1, 0, "x");
  const std::vector<Point3> ues = {{0, 0, 0}};
  const std::vector<double> two = {1.0, 2.0};
  EXPECT_THROW(correlated_shadowing({}, {}, 50.0, rng), std::invalid_argument);
  EXPECT_THROW(correlated_shadowing(ues, two, 50.0, rng), std::invalid_argument);
}

TEST(PasCorrelation, MatchesFineGridQuadrature) {
  for (double elev : {1.0, 0.9}) {
    const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(16, elev);
    for (double spread_deg : {0.5, 2.0, 5.0, 15.0, 40.0, 104.0}) {
      for (double mu : {0.0, 0.7, -2.9, 3.14}) {
        const double sigma = spread_deg * pi / 180.0;
        const Eigen::MatrixXcd r = laplacian_pas_correlation(mu, sigma, g);
        const Eigen::MatrixXcd ref = pas_quadrature(mu, sigma, g, 3600);
        EXPECT_LT((r - ref).norm(), 1e-3) << spread_deg << " deg at " << mu;
      }
    }
  }
}

TEST(PasCorrelation, HermitianPsdWithUnitDiagonal) {
  RngStream rng = derive_stream(14, 0, "pas-test");
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::uniform_real_distribution<double> spread(0.01, 1.8);
  const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(16, 0.97);
  for (int i = 0; i < 200; ++i) {
    const Eigen::MatrixXcd r = laplacian_pas_correlation(angle(rng), spread(rng), g);
    EXPECT_EQ((r - r.adjoint()).norm(), 0.0);
    EXPECT_NEAR(r.trace().real(), 16.0, 1e-9);
    for (int k = 0; k < 16; ++k) EXPECT_NEAR(std::abs(r(k, k) - 1.0), 0.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r, Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(PasCorrelation, NarrowSpreadApproachesPointSource) {
  const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(16);
  const Eigen::VectorXcd a = steering_vector(g, 0.4);
  const Eigen::MatrixXcd r = laplacian_pas_correlation(0.4, 1e-6, g);
  EXPECT_LT((r - a * a.adjoint()).norm(), 1e-4);
}

TEST(PasCorrelation, WideSpreadDecorrelatesElements) {
  const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(16);
  const Eigen::MatrixXcd r = laplacian_pas_correlation(0.0, 104.0 * pi / 180.0, g);
  for (int p = 0; p < 16; ++p)
    for (int q = 0; q < 16; ++q)
      if (p != q) {
        EXPECT_LT(std::abs(r(p, q)), 0.99);
      }
}

TEST(PasCorrelation, RejectsNonPositiveSpread) {
  const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(4);
  EXPECT_THROW(laplacian_pas_correlation(0.0, 0.0, g), std::invalid_argument);
}

TEST(RealizeChannel, PureLosHasDeterministicPower) {
  LinkModel link;
  const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(8);
  link.large_scale_gain = 3.0;
  link.k_factor = 1e300;
  link.los_steering = steering_vector(g, 0.2);
  link.corr_sqrt = Eigen::MatrixXcd::Identity(8, 8);
  link.los = true;
  RngStream rng = derive_stream(15, 0, "fade");
  for (const Eigen::VectorXcd& h : realize_channel(link, 8, rng))
    EXPECT_NEAR(h.squaredNorm(), 24.0, 1e-9);
}

TEST(RealizeChannel, SecondMomentMatchesModel) {
  const int m = 4;
  const ArrayGeometry g = ArrayGeometry::half_wavelength_uca(m);
  const Eigen::MatrixXcd r = laplacian_pas_correlation(0.5, 0.3, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
  LinkModel link;
  link.large_scale_gain = 2.0;
  link.k_factor = 3.0;
  link.los_steering = steering_vector(g, 0.5);
  link.corr_sqrt = eig.eigenvectors() *
                   eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().adjoint();
  link.est_noise_var = 0.5;
  const Eigen::MatrixXcd expected =
      2.0 * (0.75 * link.los_steering * link.los_steering.adjoint() + 0.25 * r) +
      0.5 * Eigen::MatrixXcd::Identity(m, m);

  RngStream rng = derive_stream(16, 0, "fade");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
  const int calls = 50000;
  for (int i = 0; i < calls; ++i)
    for (const Eigen::VectorXcd& h : realize_channel(link, 8, rng)) acc += h * h.adjoint();
  acc /= 8.0 * calls;
  EXPECT_LT((acc - expected).norm() / expected.norm(), 0.01);
  EXPECT_NEAR(acc.trace().real(), expected.trace().real(), 0.01 * expected.trace().real());
}

TEST(RbAverage, GainIsMeanSquaredNorm) {
  std::vector<Eigen::VectorXcd> s = {Eigen::VectorXcd::Constant(1, 1.0),
                                     Eigen::VectorXcd::Constant(1, std::sqrt(3.0))};
  EXPECT_NEAR(rb_average_gain(s), 2.0, 1e-15);
  EXPECT_THROW(rb_average_gain({}), std::invalid_argument);

  RngStream rng = derive_stream(17, 0, "rb");
  std::vector<Eigen::VectorXcd> v;
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    v.push_back(random_vector(6, rng));
    for (int k = 0; k < 6; ++k) sum += std::norm(v.back()(k));
  }
  EXPECT_NEAR(rb_average_gain(v), sum / 8.0, 1e-12);
}

TEST(RbAverage, CorrelationExamples) {
  RngStream rng = derive_stream(18, 0, "rb");
  std::vector<Eigen::VectorXcd> u;
  std::vector<Eigen::VectorXcd> scaled;
  for (int i = 0; i < 8; ++i) {
    u.push_back(random_vector(5, rng));
    scaled.push_back(std::complex<double>(-2.0, 0.5) * u.back());
  }
  EXPECT_NEAR(rb_average_correlation(u, scaled), 1.0, 1e-12);

  std::vector<Eigen::VectorXcd> e0 = {Eigen::VectorXcd::Unit(3, 0)};
  std::vector<Eigen::VectorXcd> e1 = {Eigen::VectorXcd::Unit(3, 1)};
  EXPECT_EQ(rb_average_correlation(e0, e1), 0.0);

  std::vector<Eigen::VectorXcd> v;
  double direct = 0.0;
  for (int i = 0; i < 8; ++i) {
    v.push_back(random_vector(5, rng));
    std::complex<double> dot = 0.0;
    double nu = 0.0, nv = 0.0;
    for (int k = 0; k < 5; ++k) {
      dot += std::conj(u[i](k)) * v[i](k);
      nu += std::norm(u[i](k));
      nv += std::norm(v[i](k));
    }
    direct += std::norm(dot) / (nu * nv);
  }
  const double rho = rb_average_correlation(u, v);
  EXPECT_NEAR(rho, direct / 8.0, 1e-12);
  EXPECT_GE(rho, 0.0);
  EXPECT_LE(rho, 1.0);

  // Invariant under a common unitary rotation.
  const Eigen::MatrixXcd q =
      Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd::Random(5, 5)).householderQ();
  std::vector<Eigen::VectorXcd> ru, rv;
  for (int i = 0; i < 8; ++i) {
    ru.push_back(q * u[i]);
    rv.push_back(q * v[i]);
  }
  EXPECT_NEAR(rb_average_correlation(ru, rv), rho, 1e-12);
}

TEST(RbAverage, CorrelationRejectsBadInput) {
  std::vector<Eigen::VectorXcd> one = {Eigen::VectorXcd::Unit(2, 0)};
  std::vector<Eigen::VectorXcd> zero = {Eigen::VectorXcd::Zero(2)};
  std::vector<Eigen::VectorXcd> two = {Eigen::VectorXcd::Unit(2, 0),
                                       Eigen::VectorXcd::Unit(2, 1)};
  EXPECT_THROW(rb_average_correlation(one, zero), std::invalid_argument);
  EXPECT_THROW(rb_average_correlation(one, two), std::invalid_argument);
}

TEST(CommStats, FullScaleShapesAndInvariants) {
  ScenarioConfig cfg;
  const Scenario sc = generate_scenario(cfg, 2);
  RngStream rng = derive_stream(cfg.master_seed, 2, "comm");
  const CommStats stats = build_comm_stats(sc, cfg, CommModelParams{}, rng);
  EXPECT_EQ(stats.gains.rows(), 8);
  EXPECT_EQ(stats.gains.cols(), 10);
  ASSERT_EQ(stats.correlations.size(), 8u);
  for (const Eigen::MatrixXd& rho : stats.correlations) {
    ASSERT_EQ(rho.rows(), 10);
    EXPECT_EQ((rho - rho.transpose()).norm(), 0.0);
    for (int u = 0; u < 10; ++u) EXPECT_NEAR(rho(u, u), 1.0, 1e-12);
    EXPECT_GE(rho.minCoeff(), 0.0);
    EXPECT_LE(rho.maxCoeff(), 1.0 + 1e-12);
  }
  EXPECT_GT(stats.gains.minCoeff(), 0.0);
}

TEST(CommStats, SingleUserHasOnlyDiagonal) {
  ScenarioConfig cfg;
  cfg.n_cu = 1;
  const Scenario sc = generate_scenario(cfg, 0);
  RngStream rng = derive_stream(cfg.master_seed, 0, "comm");
  const CommStats stats = build_comm_stats(sc, cfg, CommModelParams{}, rng);
  for (const Eigen::MatrixXd& rho : stats.correlations) {
    ASSERT_EQ(rho.size(), 1);
    EXPECT_NEAR(rho(0, 0), 1.0, 1e-12);
  }
}

TEST(CommStats, EstimationNoiseSetting) {
  ScenarioConfig cfg;
  cfg.n_ap = 2;
  cfg.n_cu = 3;
  const Scenario sc = generate_scenario(cfg, 0);
  CommModelParams params;
  RngStream rng = derive_stream(cfg.master_seed, 0, "comm");
  for (const auto& row : build_link_models(sc, cfg, params, rng))
    for (const LinkModel& link : row)
      EXPECT_NEAR(link.est_noise_var, 0.1 * link.large_scale_gain,
                  1e-12 * link.large_scale_gain);
  cfg.est_noise_var = 0.25;
  RngStream rng2 = derive_stream(cfg.master_seed, 0, "comm");
  for (const auto& row : build_link_models(sc, cfg, params, rng2))
    for (const LinkModel& link : row) EXPECT_EQ(link.est_noise_var, 0.25);
}

TEST(CommStats, Deterministic) {
  ScenarioConfig cfg;
  const Scenario sc = generate_scenario(cfg, 4);
  RngStream a = derive_stream(cfg.master_seed, 4, "comm");
  RngStream b = derive_stream(cfg.master_seed, 4, "comm");
  const CommStats sa = build_comm_stats(sc, cfg, CommModelParams{}, a);
  const CommStats sb = build_comm_stats(sc, cfg, CommModelParams{}, b);
  EXPECT_EQ(sa.gains, sb.gains);
  for (int k = 0; k < sa.n_ap(); ++k) EXPECT_EQ(sa.correlations[k], sb.correlations[k]);
}

}  // namespace
}  // namespace cfisac

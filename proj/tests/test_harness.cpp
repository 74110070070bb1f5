#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "optlat/harness.hpp"

using namespace optlat;

namespace {

InitialSpec smooth() {
  InitialSpec s;
  s.kind = InitialSpec::Kind::cosine;
  s.n0 = 0.5;
  s.amplitude = 0.1;
  return s;
}

ModelParams boltzmann_log_diffusion() {
  ModelParams p;
  p.eta = 0.0;
  return p;
}

SolverConfig config(Scheme scheme, double dt, double t_final) {
  SolverConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.t_final = t_final;
  return c;
}

}  // namespace

TEST(Restriction, PreservesMass) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> fine(240);
  for (auto& v : fine) v = u(rng);
  const auto coarse = restrict_average(fine, 30);
  const double fine_mass = std::accumulate(fine.begin(), fine.end(), 0.0) / 240.0;
  const double coarse_mass = std::accumulate(coarse.begin(), coarse.end(), 0.0) / 30.0;
  EXPECT_NEAR(fine_mass, coarse_mass, 1e-14);
  EXPECT_THROW(restrict_average(fine, 7), std::invalid_argument);
}

TEST(LogLogSlope, PowerLaw) {
  const std::vector<double> h{0.1, 0.05, 0.025};
  const std::vector<double> e{3e-2, 7.5e-3, 1.875e-3};
  EXPECT_NEAR(fit_loglog_slope(h, e), 2.0, 1e-12);
}

TEST(SpatialStudy, Preconditions) {
  const auto c = config(Scheme::zeroth_order, 1e-4, 1e-3);
  const auto p = boltzmann_log_diffusion();
  const std::vector<int> same{64};
  EXPECT_THROW(spatial_study(c, p, smooth(), same, 64), std::invalid_argument);
  const std::vector<int> not_nested{24};
  EXPECT_THROW(spatial_study(c, p, smooth(), not_nested, 64), std::invalid_argument);
  const std::vector<int> decreasing{32, 16};
  EXPECT_THROW(spatial_study(c, p, smooth(), decreasing, 64), std::invalid_argument);
}

TEST(SpatialStudy, ZerothOrderIsSecondOrder) {
  const auto c = config(Scheme::zeroth_order, 1e-5, 2e-3);
  const std::vector<int> grids{16, 32, 64};
  const ConvergenceReport r = spatial_study(c, boltzmann_log_diffusion(), smooth(), grids, 512);
  EXPECT_EQ(r.axis, StudyAxis::space);
  ASSERT_EQ(r.observed_orders.size(), 2u);
  EXPECT_NEAR(r.fitted_order, 2.0, 0.3);
  const double mean_order = 0.5 * (r.observed_orders[0] + r.observed_orders[1]);
  EXPECT_NEAR(r.fitted_order, mean_order, 0.1);
  for (std::size_t i = 0; i + 1 < r.step_sizes.size(); ++i)
    EXPECT_GT(r.step_sizes[i], r.step_sizes[i + 1]);
}

TEST(SpatialStudy, SingleGridHasNoOrder) {
  const auto c = config(Scheme::zeroth_order, 1e-4, 1e-3);
  const std::vector<int> grids{16};
  const ConvergenceReport r = spatial_study(c, boltzmann_log_diffusion(), smooth(), grids, 64);
  EXPECT_EQ(r.errors.size(), 1u);
  EXPECT_TRUE(r.observed_orders.empty());
  EXPECT_TRUE(std::isnan(r.fitted_order));
}

TEST(TemporalStudy, HalvingStepHalvesError) {
  ModelParams p;
  p.eps0 = std::sqrt(0.5);
  p.U0 = 1.0;
  auto init = smooth();
  init.W_amplitude = 0.2;
  const auto c = config(Scheme::semi_implicit, 0.0, 0.02);
  const std::vector<double> dts{2e-3, 1e-3, 5e-4};
  const ConvergenceReport r = temporal_study(c, p, init, 32, dts, 1.25e-4);
  EXPECT_EQ(r.axis, StudyAxis::time);
  for (double o : r.observed_orders) {
    EXPECT_GT(std::pow(2.0, o), 1.7);
    EXPECT_LT(std::pow(2.0, o), 2.3);
  }
}

TEST(TemporalStudy, ConstantStateIsDegenerate) {
  InitialSpec init;
  init.kind = InitialSpec::Kind::constant;
  ModelParams p;
  const auto c = config(Scheme::semi_implicit, 0.0, 0.01);
  const std::vector<double> dts{2e-3, 1e-3};
  const ConvergenceReport r = temporal_study(c, p, init, 16, dts, 5e-4);
  EXPECT_TRUE(r.degenerate);
  for (double e : r.errors) EXPECT_EQ(e, 0.0);
}

TEST(TemporalStudy, Preconditions) {
  ModelParams p;
  const auto c = config(Scheme::semi_implicit, 0.0, 0.01);
  const std::vector<double> dts{1e-3, 2e-3};
  EXPECT_THROW(temporal_study(c, p, smooth(), 16, dts, 5e-4), std::invalid_argument);
  const std::vector<double> coarse{1e-3};
  EXPECT_THROW(temporal_study(c, p, smooth(), 16, coarse, 1e-3), std::invalid_argument);
  const std::vector<double> odd{3e-3};
  EXPECT_THROW(temporal_study(c, p, smooth(), 16, odd, 1e-3), std::invalid_argument);
}

TEST(Studies, Deterministic) {
  const auto c = config(Scheme::zeroth_order, 1e-4, 1e-3);
  const std::vector<int> grids{8, 16};
  const auto a = spatial_study(c, boltzmann_log_diffusion(), smooth(), grids, 64, ErrorVariable::n, true);
  const auto b = spatial_study(c, boltzmann_log_diffusion(), smooth(), grids, 64, ErrorVariable::n, false);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(a.observed_orders, b.observed_orders);
}

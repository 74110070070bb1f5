#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "optlat/diagnostics.hpp"
#include "optlat/errors.hpp"
#include "optlat/initial.hpp"

using namespace optlat;

namespace {

ModelParams reference_model() {
  ModelParams p;
  p.eps0 = std::sqrt(0.5);
  p.U0 = 10.0;
  p.eta = 1.0;
  return p;
}

State step_state(int N, double W0) {
  InitialSpec s;
  s.W0 = W0;
  return s.make_state(N);
}

}  // namespace

TEST(Record, ConstantState) {
  const State s{PeriodicGrid1D(10), Field(10, 0.5), Field(10, 0.7), 0, 0.0};
  const DiagnosticsRecord r = record(s, reference_model(), 0.7);
  EXPECT_NEAR(r.variance, 0.0, 1e-30);
  EXPECT_NEAR(r.mass, 0.5, 1e-15);
  EXPECT_NEAR(r.dist_to_steady, 0.0, 1e-15);
}

TEST(Record, StepProfileTotalEnergy) {
  const State s = step_state(100, 1.0);
  const DiagnosticsRecord r = record(s, reference_model(), 1.0);
  EXPECT_NEAR(r.energy_total, -9.0 / 16.0, 1e-14);
  EXPECT_DOUBLE_EQ(r.n_min, 0.25);
  EXPECT_NEAR(r.n_max, 0.75, 1e-15);
}

TEST(Record, EnergyIdentityAndVariance) {
  InitialSpec spec;
  spec.kind = InitialSpec::Kind::cosine;
  spec.W_amplitude = 0.3;
  const State s = spec.make_state(40);
  const ModelParams p = reference_model();
  const double prev = 0.9;
  const DiagnosticsRecord r = record(s, p, prev);
  const double dx = s.grid.dx();
  double sw = 0.0, sn2 = 0.0, vw = 0.0, vn = 0.0;
  const double Wbar = mean(s.W), nbar = mean(s.n);
  for (int i = 0; i < 40; ++i) {
    sw += s.W[i] * dx;
    sn2 += s.n[i] * s.n[i] * dx;
    vw += (s.W[i] - Wbar) * (s.W[i] - Wbar) * dx;
    vn += (s.n[i] - nbar) * (s.n[i] - nbar) * dx;
  }
  EXPECT_NEAR(r.energy_total, sw - 0.5 * p.U() * sn2, 1e-14);
  EXPECT_NEAR(r.variance, vw + p.U() * prev * vn, 1e-14);
  // a second evaluation is bit-identical
  const DiagnosticsRecord again = record(s, p, prev);
  EXPECT_EQ(again.variance, r.variance);
  EXPECT_EQ(again.energy_total, r.energy_total);
}

TEST(PredictSteady, ConstantCase) {
  const State s = step_state(100, 1.0);
  const SteadyPrediction p = predict_steady(s.n, s.W, reference_model());
  EXPECT_EQ(p.kind, SteadyPrediction::Kind::constant);
  EXPECT_NEAR(p.n_inf, 0.5, 1e-15);
  EXPECT_NEAR(p.W_inf, 11.0 / 16.0, 1e-14);
}

TEST(PredictSteady, NonconstantCase) {
  const State s = step_state(100, 0.25);
  const SteadyPrediction p = predict_steady(s.n, s.W, reference_model());
  EXPECT_EQ(p.kind, SteadyPrediction::Kind::nonconstant);
  EXPECT_NEAR(p.n_inf, 0.5, 1e-15);
  EXPECT_EQ(p.W_inf, 0.0);
  EXPECT_NEAR(p.raw_W_inf, -1.0 / 16.0, 1e-14);
}

TEST(PredictSteady, ConstantData) {
  const Field n(12, 0.3), W(12, 0.4);
  const SteadyPrediction p = predict_steady(n, W, reference_model());
  EXPECT_EQ(p.kind, SteadyPrediction::Kind::constant);
  EXPECT_NEAR(p.n_inf, 0.3, 1e-15);
  EXPECT_NEAR(p.W_inf, 0.4, 1e-15);
}

TEST(PredictSteady, StableUnderRefinement) {
  const State a = step_state(20, 1.0);
  const State b = step_state(160, 1.0);
  const SteadyPrediction pa = predict_steady(a.n, a.W, reference_model());
  const SteadyPrediction pb = predict_steady(b.n, b.W, reference_model());
  EXPECT_LT(std::abs(pa.W_inf - pb.W_inf), a.grid.dx());
  EXPECT_LT(std::abs(pa.n_inf - pb.n_inf), a.grid.dx());
}

TEST(Conditions, PositivityExamples) {
  const State constant{PeriodicGrid1D(10), Field(10, 0.5), Field(10, 0.7), 0, 0.0};
  const ConditionCheck c = check_positivity_condition(constant, 0.7, reference_model(), 1e-3);
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.margin, 0.7, 1e-15);

  const State empty{PeriodicGrid1D(10), Field(10, 0.5), Field(10, 0.0), 0, 0.0};
  EXPECT_FALSE(check_positivity_condition(empty, 0.0, reference_model(), 1e-3).holds);

  const State s = step_state(100, 1.0);
  const ConditionCheck f = check_positivity_condition(s, 1.0, reference_model(), 1e-5);
  EXPECT_FALSE(f.holds);
  EXPECT_LT(f.margin, 0.0);
}

TEST(Conditions, Nontrivial) {
  EXPECT_TRUE(check_nontrivial_condition(step_state(100, 1.0), reference_model()).holds);
  // (U/2) var(n) = 5/16 > 1/4
  EXPECT_FALSE(check_nontrivial_condition(step_state(100, 0.25), reference_model()).holds);
}

TEST(FitDecay, ExactExponential) {
  std::vector<double> t, e;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(0.1 * i);
    e.push_back(std::exp(-3.0 * t.back()));
  }
  const DecayFit f = fit_decay(t, e);
  EXPECT_NEAR(f.rate, 3.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitDecay, SyntheticRates) {
  for (double rate : {0.5, 3.0, 20.0}) {
    std::vector<double> t, e;
    for (int i = 0; i <= 40; ++i) {
      t.push_back(i * 5.0 / (rate * 40));
      e.push_back(2.5 * std::exp(-rate * t.back()));
    }
    EXPECT_NEAR(fit_decay(t, e).rate / rate, 1.0, 1e-10);
  }
}

TEST(FitDecay, Rejections) {
  const std::vector<double> t{0, 1, 2, 3, 4, 5};
  EXPECT_THROW(fit_decay(t, std::vector<double>(6, 0.3)), DegenerateFit);
  EXPECT_THROW(fit_decay(std::vector<double>{0, 1, 2}, std::vector<double>{1, 0.1, 0.01}),
               std::invalid_argument);
  EXPECT_THROW(fit_decay(t, std::vector<double>{1, 0.1, 0.0, 1e-3, 1e-4, 1e-5}),
               std::invalid_argument);
}

TEST(Recorder, StrideAndFinalize) {
  DiagnosticsRecorder rec(reference_model(), {}, 3);
  State s = step_state(20, 1.0);
  for (int k = 0; k <= 7; ++k) {
    s.k = k;
    s.t = 0.1 * k;
    rec(s);
  }
  EXPECT_EQ(rec.records().size(), 3u);  // k = 0, 3, 6
  rec.finalize();
  ASSERT_EQ(rec.records().size(), 4u);
  EXPECT_NEAR(rec.records().back().t, 0.7, 1e-15);
  rec.finalize();
  EXPECT_EQ(rec.records().size(), 4u);
}

TEST(Distance, MeanAndPairwise) {
  const Field a{1.0, 3.0, 1.0, 3.0};
  EXPECT_DOUBLE_EQ(l2_distance(a, {}, 0.25), 1.0);
  const Field b{1.0, 1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(l2_distance(a, b, 0.25), std::sqrt(2.0));
}

#include "flowmotion/flow_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "flowmotion/error.hpp"
#include "flowmotion/regression.hpp"
#include "flowmotion/synth.hpp"
#include "test_util.hpp"

namespace flowmotion {
namespace {

using testing::direct_quadratic;

TEST(MonomialVector, Examples) {
  EXPECT_EQ(monomial_vector({0, 0}), (MonomialVector{0, 0, 0, 0, 0, 1}));
  EXPECT_EQ(monomial_vector({1, 1}), (MonomialVector{1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(monomial_vector({2, 3}), (MonomialVector{4, 9, 6, 2, 3, 1}));
}

TEST(MonomialVector, ProductsConsistent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-500, 500);
  for (int i = 0; i < 200; ++i) {
    const PixelCoord p{d(rng), d(rng)};
    const auto m = monomial_vector(p);
    EXPECT_EQ(m[5], 1.0);
    EXPECT_DOUBLE_EQ(m[0], m[3] * m[3]);
    EXPECT_DOUBLE_EQ(m[1], m[4] * m[4]);
    EXPECT_DOUBLE_EQ(m[2], m[3] * m[4]);
  }
}

TEST(EvaluateModel, ZeroModelGivesZeroFlow) {
  QuadraticFlowModel m;
  m.norm = NormTransform::for_domain(854, 480);
  EXPECT_EQ(evaluate_model(m, {123, 45}), (FlowVec{0, 0}));
  EXPECT_EQ(evaluate_model(m, {0, 0}), (FlowVec{0, 0}));
}

TEST(EvaluateModel, ConstantColumnGivesConstantFlow) {
  QuadraticFlowModel m;
  m.norm = NormTransform::for_domain(854, 480);
  m.coeffs[0][5] = 5.0;
  m.coeffs[1][5] = -3.0;
  for (PixelCoord p : {PixelCoord{0, 0}, PixelCoord{853, 479}, PixelCoord{400.5, 17}}) {
    EXPECT_EQ(evaluate_model(m, p), (FlowVec{5.0, -3.0}));
  }
}

TEST(EvaluateModel, MatchesGeneratorOracleOnGrid) {
  std::mt19937_64 rng(11);
  synth::SceneSpec spec;
  spec.width = 854;
  spec.height = 480;
  spec.background = testing::random_coeffs(rng);
  const auto model = spec.background_model();
  for (int y = 0; y < spec.height; y += 50) {
    for (int x = 0; x < spec.width; x += 50) {
      const FlowVec got = evaluate_model(model, {double(x), double(y)});
      const FlowVec want = direct_quadratic(spec.background, spec.width, spec.height, x, y);
      EXPECT_NEAR(got.u, want.u, 1e-9);
      EXPECT_NEAR(got.v, want.v, 1e-9);
    }
  }
}

TEST(EvaluateLinear, Examples) {
  LinearFlowModel m;
  m.norm = NormTransform::for_domain(100, 50);
  EXPECT_EQ(evaluate_linear(m, {10, 10}), (FlowVec{0, 0}));
  m.coeffs[0][2] = 2.5;
  m.coeffs[1][2] = -1.0;
  EXPECT_EQ(evaluate_linear(m, {99, 3}), (FlowVec{2.5, -1.0}));
}

TEST(EvaluateLinear, PlantedAffineAtGridPoints) {
  LinearFlowModel m;
  m.norm = NormTransform::for_domain(201, 101);
  m.coeffs = {{{3.0, -2.0, 1.0}, {0.5, 4.0, -7.0}}};
  for (int y = 0; y < 101; y += 25) {
    for (int x = 0; x < 201; x += 25) {
      const double xn = (x - 100.0) / 100.0;
      const double yn = (y - 50.0) / 50.0;
      const FlowVec f = evaluate_linear(m, {double(x), double(y)});
      EXPECT_NEAR(f.u, 3.0 * xn - 2.0 * yn + 1.0, 1e-12);
      EXPECT_NEAR(f.v, 0.5 * xn + 4.0 * yn - 7.0, 1e-12);
    }
  }
  const auto q = m.as_quadratic();
  EXPECT_EQ(evaluate_model(q, {37, 81}).u, evaluate_linear(m, {37, 81}).u);
}

// Along any axis-parallel line the model is a polynomial of degree <= 2, so
// the parabola through three points predicts a fourth.
TEST(EvaluateModel, DegreeConsistencyAlongAxes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0, 800);
  for (int trial = 0; trial < 100; ++trial) {
    QuadraticFlowModel m{testing::random_coeffs(rng), NormTransform::for_domain(854, 480)};
    const double fixed = pos(rng);
    const double t[4] = {pos(rng), pos(rng) + 1, pos(rng) + 2, pos(rng)};
    for (bool along_x : {true, false}) {
      auto eval = [&](double s) {
        return along_x ? evaluate_model(m, {s, fixed}).u : evaluate_model(m, {fixed, s}).v;
      };
      double pred = 0.0;
      for (int i = 0; i < 3; ++i) {
        double basis = 1.0;
        for (int j = 0; j < 3; ++j) {
          if (j != i) basis *= (t[3] - t[j]) / (t[i] - t[j]);
        }
        pred += basis * eval(t[i]);
      }
      EXPECT_NEAR(pred, eval(t[3]), 1e-6 * (1.0 + std::abs(eval(t[3]))));
    }
  }
}

// Fitting in normalized coordinates and evaluating at pixels agrees with a
// raw-coordinate least-squares solve on small, well-conditioned inputs.
TEST(Normalization, TransparentOnSmallInputs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> flow(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SamplePoint> samples;
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 8; ++x) samples.push_back({{double(x), double(y)}, {flow(rng), flow(rng)}});
    }
    const auto model = lsre_fit(samples, {8, 6});

    Eigen::MatrixXd a(samples.size(), 6);
    Eigen::MatrixXd b(samples.size(), 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double x = samples[i].coord.x;
      const double y = samples[i].coord.y;
      a.row(i) << x * x, y * y, x * y, x, y, 1.0;
      b.row(i) << samples[i].flow.u, samples[i].flow.v;
    }
    const Eigen::MatrixXd raw = a.colPivHouseholderQr().solve(b);
    for (const auto& s : samples) {
      const double x = s.coord.x;
      const double y = s.coord.y;
      Eigen::RowVectorXd row(6);
      row << x * x, y * y, x * y, x, y, 1.0;
      const Eigen::RowVector2d want = row * raw;
      const FlowVec got = evaluate_model(model, s.coord);
      EXPECT_NEAR(got.u, want(0), 1e-9 * std::max(1.0, std::abs(want(0))));
      EXPECT_NEAR(got.v, want(1), 1e-9 * std::max(1.0, std::abs(want(1))));
    }
  }
}

TEST(FlowField, RejectsBadDimensionsAndValues) {
  EXPECT_THROW(FlowField(0, 3), Error);
  EXPECT_THROW(FlowField(3, -1), Error);
  EXPECT_THROW(FlowField(2, 2, std::vector<float>(3), std::vector<float>(4)), Error);
  std::vector<float> u(4, 0.0f);
  u[2] = std::numeric_limits<float>::quiet_NaN();
  try {
    FlowField(2, 2, u, std::vector<float>(4));
    FAIL() << "NaN accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValues);
  }
  std::vector<float> v(4, 0.0f);
  v[0] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(FlowField(2, 2, std::vector<float>(4), v), Error);
}

TEST(FlowField, PlanesAreRowMajor) {
  FlowField f(3, 2);
  f.set(2, 1, {1.5, -2.5});
  EXPECT_EQ(f.u()[5], 1.5f);
  EXPECT_EQ(f.v()[5], -2.5f);
  EXPECT_EQ(f.at(2, 1), (FlowVec{1.5, -2.5}));
}

TEST(NormTransform, MapsDomainOntoUnitSquare) {
  const auto t = NormTransform::for_domain(854, 480);
  const auto lo = t.apply({0, 0});
  const auto hi = t.apply({853, 479});
  EXPECT_DOUBLE_EQ(lo.x, -1.0);
  EXPECT_DOUBLE_EQ(lo.y, -1.0);
  EXPECT_DOUBLE_EQ(hi.x, 1.0);
  EXPECT_DOUBLE_EQ(hi.y, 1.0);
  const auto single = NormTransform::for_domain(1, 1).apply({0, 0});
  EXPECT_EQ(single.x, 0.0);
  EXPECT_EQ(single.y, 0.0);
}

}  // namespace
}  // namespace flowmotion

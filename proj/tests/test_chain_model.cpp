#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rareips/chain_model.hpp"
#include "test_support.hpp"

namespace rareips {
namespace {

double det3(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double orthogonality_defect(const Matrix3& m) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += m[i][k] * m[j][k];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

TEST(ChainModel, InitialStates) {
  GaussianWalkModel walk(15);
  PmdModel pmd(15, 0.5);
  EXPECT_EQ(walk.initial_state(), State{0.0});
  EXPECT_EQ(pmd.initial_state(), (State{0.0, 0.0, 0.0}));
  EXPECT_EQ(walk.initial_state(), walk.initial_state());
  EXPECT_EQ(pmd.initial_state(), pmd.initial_state());
  EXPECT_EQ(walk.initial_energy(), 0.0);
  EXPECT_EQ(pmd.initial_energy(), 0.0);
}

TEST(ChainModel, RejectsBadParameters) {
  EXPECT_THROW(GaussianWalkModel(0), ModelError);
  EXPECT_THROW(PmdModel(15, 0.0), ModelError);
  EXPECT_THROW(PmdModel(15, -1.0), ModelError);
  EXPECT_THROW(PmdModel(0, 0.5), ModelError);
}

TEST(ChainModel, GaussianStepAddsScriptedDraw) {
  GaussianWalkModel walk(15);
  TapeSource tape({1.3});
  EXPECT_EQ(walk.step(0, State{0.0}, tape), State{1.3});
}

TEST(ChainModel, StepIndexOutOfRange) {
  GaussianWalkModel walk(3);
  TapeSource tape({0.0, 0.0});
  EXPECT_THROW(walk.step(3, State{0.0}, tape), std::out_of_range);
  PmdModel pmd(2, 0.5);
  EXPECT_THROW(pmd.step(2, State{0.0, 0.0, 0.0}, tape), std::out_of_range);
}

TEST(ChainModel, PmdStepFromOriginIsScaledAxis) {
  PmdModel pmd(15, 0.5);
  // cos(theta) = 2 * 0.75 - 1 = 0.5, phi = 2 pi * 0.3.
  TapeSource tape({0.75, 0.3});
  const State out = pmd.step(0, State{0.0, 0.0, 0.0}, tape);
  const double theta = std::acos(0.5);
  EXPECT_NEAR(out[0], 0.5 * std::cos(theta), 1e-15);
  EXPECT_NEAR(out[1], 0.5 * std::sin(theta), 1e-15);
  EXPECT_EQ(out[2], 0.0);
}

TEST(ChainModel, PmdStepNormBound) {
  PmdModel pmd(15, 0.5);
  CounterStream rng(3, {});
  State x{1.0, -2.0, 0.5};
  for (int i = 0; i < 1000; ++i) {
    const State y = pmd.step(i % 15, x, rng);
    EXPECT_LE(pmd.energy(y), pmd.energy(x) + 0.5 + 1e-12);
    EXPECT_GE(pmd.energy(y), pmd.energy(x) - 0.5 - 1e-12);
    x = y;
    if (pmd.energy(x) > 6.0) x = {1.0, -2.0, 0.5};
  }
}

TEST(ChainModel, PmdTrajectoriesRespectTriangleBound) {
  PmdModel pmd(15, 0.5);
  for (std::uint64_t t = 0; t < 2000; ++t) {
    CounterStream rng(11, {0, 0, t, StreamPurpose::kMutation});
    State x = pmd.initial_state();
    for (std::size_t p = 0; p < 15; ++p) {
      x = pmd.step(p, x, rng);
      ASSERT_LE(pmd.energy(x), (p + 1) * 0.5 + 1e-12);
    }
  }
}

TEST(ChainModel, Energies) {
  GaussianWalkModel walk(15);
  PmdModel pmd(15, 0.5);
  EXPECT_EQ(walk.energy(State{3.2}), 3.2);
  EXPECT_EQ(pmd.energy(State{3.0, 4.0, 0.0}), 5.0);
  EXPECT_EQ(pmd.energy(State{0.0, 0.0, 0.0}), 0.0);
}

TEST(RotationMatrix, ZeroAngleIsIdentity) {
  for (double theta : {0.0, 0.3, 1.7, 3.0, -2.2}) {
    const Matrix3 r = rotation_matrix(theta, 0.0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(r[i][j], i == j ? 1.0 : 0.0, 1e-15);
      }
    }
  }
}

TEST(RotationMatrix, FixesItsAxis) {
  for (double theta : {0.1, 0.9, 2.5}) {
    for (double phi : {0.4, 2.0, 5.9}) {
      const Matrix3 r = rotation_matrix(theta, phi);
      const auto axis = rotation_axis(theta);
      for (int i = 0; i < 3; ++i) {
        const double v = r[i][0] * axis[0] + r[i][1] * axis[1] + r[i][2] * axis[2];
        EXPECT_NEAR(v, axis[i], 1e-15);
      }
    }
  }
}

TEST(RotationMatrix, DisplayedEntries) {
  const double th = 0.7, ph = 1.1;
  const Matrix3 r = rotation_matrix(th, ph);
  const double c = std::cos(th), s = std::sin(th);
  EXPECT_DOUBLE_EQ(r[0][0], c * c + s * s * std::cos(ph));
  EXPECT_DOUBLE_EQ(r[1][2], -c * std::sin(ph));
  EXPECT_DOUBLE_EQ(r[2][0], -s * std::sin(ph));
  EXPECT_LT(orthogonality_defect(r), 1e-12);
  EXPECT_NEAR(det3(r), 1.0, 1e-12);
}

TEST(RotationMatrix, RandomAnglesAreProperRotations) {
  CounterStream rng(17, {});
  for (int i = 0; i < 1000; ++i) {
    const double theta = std::acos(2.0 * rng.uniform() - 1.0);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const Matrix3 r = rotation_matrix(theta, phi);
    ASSERT_LT(orthogonality_defect(r), 1e-12);
    ASSERT_NEAR(det3(r), 1.0, 1e-12);
  }
}

TEST(ChainModel, GaussianMarginalMatchesWalk) {
  const std::size_t n = 15;
  const std::size_t trajectories = 100000;
  GaussianWalkModel walk(n);
  std::vector<double> end(trajectories);
  for (std::size_t t = 0; t < trajectories; ++t) {
    CounterStream rng(5, {0, 0, t, StreamPurpose::kMutation});
    State x = walk.initial_state();
    for (std::size_t p = 0; p < n; ++p) x = walk.step(p, x, rng);
    end[t] = x[0];
  }
  const auto s = test::summarize(end);
  EXPECT_NEAR(s.mean, 0.0, 4.0 * std::sqrt(double(n) / trajectories));
  // Var of the sample variance of a normal: 2 sigma^4 / (m - 1).
  EXPECT_NEAR(s.variance, double(n),
              4.0 * double(n) * std::sqrt(2.0 / (trajectories - 1)));
}

}  // namespace
}  // namespace rareips

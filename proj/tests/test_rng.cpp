#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rareips/rng.hpp"
#include "test_support.hpp"

namespace rareips {
namespace {

TEST(CounterStream, SameCoordinatesSameSequence) {
  CounterStream a(42, {3, 7, 11, StreamPurpose::kMutation});
  CounterStream b(42, {3, 7, 11, StreamPurpose::kMutation});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_word(), b.next_word());
  }
}

TEST(CounterStream, CoordinatesAndPurposeSeparateStreams) {
  const StreamCoordinates base{3, 7, 11, StreamPurpose::kMutation};
  std::vector<StreamCoordinates> others = {
      {4, 7, 11, StreamPurpose::kMutation},
      {3, 8, 11, StreamPurpose::kMutation},
      {3, 7, 12, StreamPurpose::kMutation},
      {3, 7, 11, StreamPurpose::kSelection},
  };
  CounterStream ref(42, base);
  const auto first = ref.next_word();
  for (const auto& c : others) {
    CounterStream s(42, c);
    EXPECT_NE(s.next_word(), first);
  }
  CounterStream other_seed(43, base);
  EXPECT_NE(other_seed.next_word(), first);
}

TEST(CounterStream, UniformMoments) {
  CounterStream s(1, {});
  std::vector<double> u(200000);
  for (auto& x : u) {
    x = s.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  const auto sum = test::summarize(u);
  EXPECT_NEAR(sum.mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / u.size()));
  EXPECT_NEAR(sum.variance, 1.0 / 12.0, 1e-3);
}

TEST(CounterStream, NormalMomentsAndTail) {
  CounterStream s(2, {});
  const std::size_t n = 400000;
  std::vector<double> z(n);
  std::size_t beyond_two = 0;
  for (auto& x : z) {
    x = s.normal();
    if (x > 2.0) ++beyond_two;
  }
  const auto sum = test::summarize(z);
  EXPECT_NEAR(sum.mean, 0.0, 4.0 / std::sqrt(double(n)));
  EXPECT_NEAR(sum.variance, 1.0, 4.0 * std::sqrt(2.0 / n));
  const double p = test::normal_tail_oracle(1, 2.0);
  EXPECT_NEAR(double(beyond_two) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(CounterStream, AdjacentParticleStreamsUncorrelated) {
  const std::size_t n = 100000;
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CounterStream a(9, {0, 0, i, StreamPurpose::kMutation});
    CounterStream b(9, {0, 0, i + 1, StreamPurpose::kMutation});
    cross += a.normal() * b.normal();
  }
  EXPECT_NEAR(cross / n, 0.0, 4.0 / std::sqrt(double(n)));
}

TEST(TapeSource, ReplaysAndThrowsWhenExhausted) {
  TapeSource t({0.25, -1.5});
  EXPECT_EQ(t.uniform(), 0.25);
  EXPECT_EQ(t.normal(), -1.5);
  EXPECT_EQ(t.remaining(), 0u);
  EXPECT_THROW(t.uniform(), std::out_of_range);
}

TEST(StreamFactory, CounterFactoryMatchesDirectStream) {
  CounterStreamFactory f(5, 77);
  const double via_factory = f.stream(2, 3, StreamPurpose::kSelection).uniform();
  CounterStream direct(5, {77, 2, 3, StreamPurpose::kSelection});
  EXPECT_EQ(via_factory, direct.uniform());
}

}  // namespace
}  // namespace rareips

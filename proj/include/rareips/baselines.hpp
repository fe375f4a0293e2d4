#pragma once

#include <cstddef>
#include <stdexcept>
#include <variant>

#include "rareips/chain_model.hpp"
#include "rareips/estimators.hpp"
#include "rareips/rng.hpp"

namespace rareips {

// Constant drift lambda on every increment.
struct IncrementShift {
  double lambda = 0.0;
};

// Drift lambda * (n - p + 1) on step p, i.e. the path tilted by
// exp(lambda * sum_p X_p).
struct PositionTilt {
  double lambda = 0.0;
};

using IsScheme = std::variant<IncrementShift, PositionTilt>;

class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// N independent trajectories of the untwisted chain; trajectory i uses the
// mutation stream at (epoch 0, particle i).
WeightedSample mc_sample(const ChainModel& model, std::size_t population,
                         StreamFactory& streams);

// Plain Monte Carlo: p = hits / N, q = p (1 - p).
EstimateResult mc_estimate(const ChainModel& model, const Target& target,
                           std::size_t population, StreamFactory& streams);

// Trajectories of the drifted Gaussian walk, each weighted by its pathwise
// likelihood ratio dP/dQ. Throws UnsupportedModel for other models.
WeightedSample is_sample(const ChainModel& model, const IsScheme& scheme,
                         std::size_t population, StreamFactory& streams);

EstimateResult is_estimate(const ChainModel& model, const IsScheme& scheme,
                           const Target& target, std::size_t population,
                           StreamFactory& streams);

// Drift added to increment p (1-based) under the twisted measure.
double is_drift(const IsScheme& scheme, std::size_t p, std::size_t n);

// Closed-form log dP/dQ of a Gaussian-walk path (x_0, ..., x_n).
double is_log_likelihood_ratio(const IsScheme& scheme,
                               std::span<const double> path);

// lambda = a / n, which makes the level a the mean endpoint of the drifted
// walk.
double optimal_increment_lambda(double a, std::size_t n);

// Tilt parameter for PositionTilt. Two normalizations circulate for it;
// both are exposed.
enum class TiltNormalization {
  kNMinusOne,  // 2a / [n (n - 1)]
  kNPlusOne,   // 2a / [n (n + 1)]
};

double optimal_position_lambda(
    double a, std::size_t n,
    TiltNormalization norm = TiltNormalization::kNMinusOne);

}  // namespace rareips

#include "rareips/baselines.hpp"

#include <cmath>

namespace rareips {

WeightedSample mc_sample(const ChainModel& model, std::size_t population,
                         StreamFactory& streams) {
  if (population == 0) throw std::invalid_argument("population must be >= 1");
  const std::size_t n = model.n_steps();
  WeightedSample s;
  s.variance_form = VarianceForm::kCentered;
  s.energies.resize(population);
  s.log_weights.assign(population, 0.0);
  State a = model.initial_state();
  State b(a.size());
  const State x0 = a;
  for (std::size_t i = 0; i < population; ++i) {
    RandomSource& rng = streams.stream(0, i, StreamPurpose::kMutation);
    a = x0;
    for (std::size_t p = 0; p < n; ++p) {
      model.step(p, a, b, rng);
      std::swap(a, b);
    }
    s.energies[i] = model.energy(a);
  }
  return s;
}

EstimateResult mc_estimate(const ChainModel& model, const Target& target,
                           std::size_t population, StreamFactory& streams) {
  EstimateResult r = estimate(mc_sample(model, population, streams), target);
  // Bernoulli variance written in its textbook form.
  r.q_hat = r.p_hat * (1.0 - r.p_hat);
  return r;
}

double is_drift(const IsScheme& scheme, std::size_t p, std::size_t n) {
  if (const auto* shift = std::get_if<IncrementShift>(&scheme)) {
    return shift->lambda;
  }
  return std::get<PositionTilt>(scheme).lambda *
         static_cast<double>(n - p + 1);
}

double is_log_likelihood_ratio(const IsScheme& scheme,
                               std::span<const double> path) {
  const std::size_t n = path.size() - 1;
  const double nd = static_cast<double>(n);
  if (const auto* shift = std::get_if<IncrementShift>(&scheme)) {
    const double l = shift->lambda;
    return -l * (path[n] - path[0]) + nd * l * l / 2.0;
  }
  const double l = std::get<PositionTilt>(scheme).lambda;
  double sum_x = 0.0;
  for (std::size_t p = 1; p <= n; ++p) sum_x += path[p];
  const double sum_p2 = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 6.0;
  return -l * sum_x + l * l / 2.0 * sum_p2;
}

WeightedSample is_sample(const ChainModel& model, const IsScheme& scheme,
                         std::size_t population, StreamFactory& streams) {
  if (model.kind() != ModelKind::kGaussianWalk) {
    throw UnsupportedModel("importance sampling twists are defined for the "
                           "gaussian walk only, not '" + model.name() + "'");
  }
  if (population == 0) throw std::invalid_argument("population must be >= 1");
  const double lambda = std::visit([](auto s) { return s.lambda; }, scheme);
  if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");

  const std::size_t n = model.n_steps();
  WeightedSample s;
  s.variance_form = VarianceForm::kCentered;
  s.energies.resize(population);
  s.log_weights.resize(population);
  std::vector<double> path(n + 1);
  for (std::size_t i = 0; i < population; ++i) {
    RandomSource& rng = streams.stream(0, i, StreamPurpose::kMutation);
    path[0] = model.initial_state()[0];
    for (std::size_t p = 1; p <= n; ++p) {
      path[p] = path[p - 1] + is_drift(scheme, p, n) + rng.normal();
    }
    s.energies[i] = path[n];
    s.log_weights[i] = is_log_likelihood_ratio(scheme, path);
  }
  return s;
}

EstimateResult is_estimate(const ChainModel& model, const IsScheme& scheme,
                           const Target& target, std::size_t population,
                           StreamFactory& streams) {
  return estimate(is_sample(model, scheme, population, streams), target);
}

double optimal_increment_lambda(double a, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  return a / static_cast<double>(n);
}

double optimal_position_lambda(double a, std::size_t n,
                               TiltNormalization norm) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  const double nd = static_cast<double>(n);
  if (norm == TiltNormalization::kNPlusOne) return 2.0 * a / (nd * (nd + 1.0));
  if (n == 1) throw std::invalid_argument("the n(n-1) normalization needs n >= 2");
  return 2.0 * a / (nd * (nd - 1.0));
}

}  // namespace rareips

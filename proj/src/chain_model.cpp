#include "rareips/chain_model.hpp"

#include <cmath>
#include <numbers>

namespace rareips {

double ChainModel::initial_energy() const { return energy(initial_state()); }

State ChainModel::step(std::size_t p, const State& x, RandomSource& rng) const {
  if (x.size() != dim()) {
    throw ModelError("state has " + std::to_string(x.size()) +
                     " coordinates, model expects " + std::to_string(dim()));
  }
  State out(dim());
  step(p, x, out, rng);
  return out;
}

void ChainModel::check_step_index(std::size_t p) const {
  if (p >= n_steps()) {
    throw std::out_of_range("step index " + std::to_string(p) +
                            " outside [0, " + std::to_string(n_steps()) + ")");
  }
}

GaussianWalkModel::GaussianWalkModel(std::size_t n_steps) : n_steps_(n_steps) {
  if (n_steps == 0) throw ModelError("gaussian walk needs n_steps >= 1");
}

void GaussianWalkModel::step(std::size_t p, std::span<const double> in,
                             std::span<double> out, RandomSource& rng) const {
  check_step_index(p);
  out[0] = in[0] + rng.normal();
}

PmdModel::PmdModel(std::size_t n_segments, double sigma)
    : n_segments_(n_segments), sigma_(sigma) {
  if (n_segments == 0) throw ModelError("pmd model needs n_segments >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ModelError("pmd model needs a finite sigma > 0");
  }
}

std::array<double, 3> rotation_axis(double theta) {
  return {std::cos(theta), std::sin(theta), 0.0};
}

Matrix3 rotation_matrix(double theta, double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  return {{{c * c + s * s * cp, s * c * (1.0 - cp), s * sp},
           {s * c * (1.0 - cp), s * s + c * c * cp, -c * sp},
           {-s * sp, c * sp, cp}}};
}

std::array<double, 3> PmdModel::apply_segment(std::span<const double> in,
                                              double theta, double phi) const {
  const Matrix3 r = rotation_matrix(theta, phi);
  const auto axis = rotation_axis(theta);
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = r[i][0] * in[0] + r[i][1] * in[1] + r[i][2] * in[2] +
             sigma_ * axis[i];
  }
  return out;
}

void PmdModel::step(std::size_t p, std::span<const double> in,
                    std::span<double> out, RandomSource& rng) const {
  check_step_index(p);
  const double cos_theta = 2.0 * rng.uniform() - 1.0;
  const double theta = std::acos(cos_theta);
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const auto next = apply_segment(in, theta, phi);
  out[0] = next[0];
  out[1] = next[1];
  out[2] = next[2];
}

double PmdModel::energy(std::span<const double> x) const {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

}  // namespace rareips

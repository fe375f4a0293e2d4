#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rareips/rng.hpp"

namespace rareips {

// Flat coordinate vector; its length is fixed by the model that produced it.
using State = std::vector<double>;

using Matrix3 = std::array<std::array<double, 3>, 3>;

enum class ModelKind { kGaussianWalk, kPmdFiber };

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time-inhomogeneous Markov chain on R^dim together with the scalar
/// energy V whose tail is being estimated.
///
/// Implementations are immutable after construction; `step` only touches its
/// arguments, so it can be called concurrently for different particles.
class ChainModel {
 public:
  virtual ~ChainModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::string name() const = 0;

  virtual std::size_t dim() const = 0;

  // Horizon n: the chain is defined for steps 0 <= p < n.
  virtual std::size_t n_steps() const = 0;

  virtual State initial_state() const = 0;

  // One transition X_p -> X_{p+1} of the untwisted kernel. `in` and `out`
  // must both have length dim() and may not alias.
  virtual void step(std::size_t p, std::span<const double> in,
                    std::span<double> out, RandomSource& rng) const = 0;

  virtual double energy(std::span<const double> x) const = 0;

  // V(x_0); the anchor used by the increment weights.
  double initial_energy() const;

  State step(std::size_t p, const State& x, RandomSource& rng) const;

 protected:
  void check_step_index(std::size_t p) const;
};

// X_{p+1} = X_p + W_{p+1}, W standard normal, X_0 = 0, V(x) = x.
class GaussianWalkModel final : public ChainModel {
 public:
  explicit GaussianWalkModel(std::size_t n_steps);

  ModelKind kind() const override { return ModelKind::kGaussianWalk; }
  std::string name() const override { return "gaussian"; }
  std::size_t dim() const override { return 1; }
  std::size_t n_steps() const override { return n_steps_; }
  State initial_state() const override { return {0.0}; }
  void step(std::size_t p, std::span<const double> in, std::span<double> out,
            RandomSource& rng) const override;
  double energy(std::span<const double> x) const override { return x[0]; }

  using ChainModel::step;

 private:
  std::size_t n_steps_;
};

// Concatenation of birefringent segments: r_{p+1} = R(theta, phi) r_p +
// sigma * Omega(theta), with cos(theta) ~ U(-1, 1) drawn before
// phi ~ U(0, 2 pi). V(r) = |r|, the differential group delay.
class PmdModel final : public ChainModel {
 public:
  PmdModel(std::size_t n_segments, double sigma);

  ModelKind kind() const override { return ModelKind::kPmdFiber; }
  std::string name() const override { return "pmd"; }
  std::size_t dim() const override { return 3; }
  std::size_t n_steps() const override { return n_segments_; }
  State initial_state() const override { return {0.0, 0.0, 0.0}; }
  void step(std::size_t p, std::span<const double> in, std::span<double> out,
            RandomSource& rng) const override;
  double energy(std::span<const double> x) const override;

  double sigma() const { return sigma_; }

  // The transition with the segment angles supplied directly.
  std::array<double, 3> apply_segment(std::span<const double> in, double theta,
                                      double phi) const;

  using ChainModel::step;

 private:
  std::size_t n_segments_;
  double sigma_;
};

// Rotation by phi about the in-plane axis Omega(theta) = (cos, sin, 0).
Matrix3 rotation_matrix(double theta, double phi);

std::array<double, 3> rotation_axis(double theta);

}  // namespace rareips

#include "rareips/ips_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace rareips {

WeightScheme WeightScheme::potential(double beta, std::size_t period) {
  WeightScheme s{PotentialWeights{beta}, period};
  s.validate();
  return s;
}

WeightScheme WeightScheme::increment(double alpha, std::size_t period) {
  WeightScheme s{IncrementWeights{alpha}, period};
  s.validate();
  return s;
}

double WeightScheme::strength() const {
  return std::visit(
      [](const auto& w) {
        if constexpr (std::is_same_v<std::decay_t<decltype(w)>,
                                     PotentialWeights>) {
          return w.beta;
        } else {
          return w.alpha;
        }
      },
      weights);
}

std::string WeightScheme::label() const {
  std::ostringstream os;
  os << (is_potential() ? "potential(beta=" : "increment(alpha=")
     << strength() << ", n0=" << selection_period << ")";
  return os.str();
}

void WeightScheme::validate() const {
  const double s = strength();
  if (!std::isfinite(s) || s < 0.0) {
    throw std::invalid_argument(std::string(is_potential() ? "beta" : "alpha") +
                                " must be finite and >= 0");
  }
  if (selection_period == 0) {
    throw std::invalid_argument("selection_period must be >= 1");
  }
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - m);
  return m + std::log(sum);
}

namespace {

void check_weights(std::span<const double> log_weights, std::uint64_t epoch) {
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (!std::isfinite(log_weights[i])) {
      std::ostringstream os;
      os << "non-finite selection weight at epoch " << epoch << " (particle "
         << i << ", log G = " << log_weights[i] << ")";
      throw EngineError(os.str());
    }
  }
}

// Unnormalized cumulative weights exp(lw - max), summed in index order.
std::vector<double> cumulative_weights(std::span<const double> log_weights,
                                       double& max_out) {
  max_out = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> cum(log_weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    acc += std::exp(log_weights[i] - max_out);
    cum[i] = acc;
  }
  return cum;
}

}  // namespace

std::vector<double> selection_probabilities(
    std::span<const double> log_weights) {
  if (log_weights.empty()) return {};
  check_weights(log_weights, 0);
  double m = 0.0;
  const auto cum = cumulative_weights(log_weights, m);
  std::vector<double> probs(log_weights.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::exp(log_weights[i] - m) / cum.back();
  }
  return probs;
}

SelectionResult select(std::span<const double> log_weights,
                       StreamFactory& streams, std::uint64_t epoch) {
  if (log_weights.empty()) {
    throw std::invalid_argument("selection needs at least one particle");
  }
  check_weights(log_weights, epoch);
  const std::size_t n = log_weights.size();
  double m = 0.0;
  const auto cum = cumulative_weights(log_weights, m);
  const double total = cum.back();

  SelectionResult result;
  result.log_eta = m + std::log(total) - std::log(static_cast<double>(n));
  result.parents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double target =
        streams.stream(epoch, i, StreamPurpose::kSelection).uniform() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    result.parents[i] =
        std::min(static_cast<std::size_t>(it - cum.begin()), n - 1);
  }
  return result;
}

std::size_t EnsembleHistory::epoch_time(std::size_t epoch) const {
  if (epoch >= epoch_count()) throw std::out_of_range("epoch out of range");
  return epoch * scheme_.selection_period;
}

std::size_t EnsembleHistory::checkpoint_time(std::size_t checkpoint) const {
  if (checkpoint > epoch_count()) {
    throw std::out_of_range("checkpoint out of range");
  }
  return std::min(checkpoint * scheme_.selection_period, horizon_);
}

void EnsembleHistory::require_genealogy(const char* what) const {
  if (!has_genealogy_) {
    throw std::logic_error(std::string(what) +
                           " requires a run with record_genealogy enabled");
  }
}

std::span<const std::size_t> EnsembleHistory::ancestors(
    std::size_t epoch) const {
  require_genealogy("ancestor indices");
  return ancestors_.at(epoch);
}

std::span<const double> EnsembleHistory::state(std::size_t time,
                                               std::size_t particle) const {
  if (time > horizon_) throw std::out_of_range("time out of range");
  if (particle >= population_) throw std::out_of_range("particle out of range");
  if (time == horizon_) return final_state(particle);
  require_genealogy("intermediate states");
  return std::span<const double>(states_[time]).subspan(particle * dim_, dim_);
}

std::span<const double> EnsembleHistory::final_state(
    std::size_t particle) const {
  if (particle >= population_) throw std::out_of_range("particle out of range");
  return std::span<const double>(states_.back()).subspan(particle * dim_, dim_);
}

Particle EnsembleHistory::particle(std::size_t checkpoint,
                                   std::size_t index) const {
  const std::size_t last = epoch_count();
  if (checkpoint > last) throw std::out_of_range("checkpoint out of range");
  if (index >= population_) throw std::out_of_range("particle out of range");
  if (checkpoint != last) require_genealogy("intermediate checkpoints");
  const std::size_t slot = has_genealogy_ ? checkpoint : 0;
  const auto x = state(checkpoint_time(checkpoint), index);
  Particle p;
  p.state.assign(x.begin(), x.end());
  p.log_correction = log_correction_[slot][index];
  p.parent_energy = parent_energy_[slot][index];
  if (has_genealogy_ && checkpoint > 0) {
    p.ancestor = ancestors_[checkpoint - 1][index];
  }
  return p;
}

void EnsembleHistory::write_dump(std::ostream& out) const {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << "time,epoch,particle,predecessor,log_eta,log_correction,"
         "parent_energy";
  for (std::size_t d = 0; d < dim_; ++d) out << ",x" << d;
  out << '\n';
  const std::size_t n0 = scheme_.selection_period;
  const std::size_t first_time = has_genealogy_ ? 0 : horizon_;
  for (std::size_t t = first_time; t <= horizon_; ++t) {
    // Interval (t_k, t_{k+1}] belongs to epoch k; time 0 to no epoch.
    const bool has_epoch = t > 0;
    const std::size_t k = has_epoch ? (t - 1) / n0 : 0;
    const bool after_selection = has_epoch && (t - 1) % n0 == 0;
    const bool at_checkpoint = t % n0 == 0 || t == horizon_;
    const std::size_t checkpoint = t == horizon_ ? epoch_count() : t / n0;
    for (std::size_t i = 0; i < population_; ++i) {
      out << t << ',';
      if (has_epoch) out << k;
      out << ',' << i << ',';
      if (has_epoch && has_genealogy_) {
        out << (after_selection ? ancestors_[k][i] : i);
      }
      out << ',';
      if (has_epoch) out << log_eta_[k];
      out << ',';
      if (at_checkpoint) {
        const std::size_t slot = has_genealogy_ ? checkpoint : 0;
        out << log_correction_[slot][i] << ',' << parent_energy_[slot][i];
      } else {
        out << ',';
      }
      for (double c : state(t, i)) out << ',' << c;
      out << '\n';
    }
  }
  out.precision(old_precision);
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace

EnsembleHistory run_ips(const ChainModel& model, const WeightScheme& scheme,
                        const EngineOptions& options, StreamFactory& streams) {
  scheme.validate();
  const std::size_t n_particles = options.population;
  if (n_particles < 2) throw std::invalid_argument("population must be >= 2");
  const std::size_t horizon = options.horizon.value_or(model.n_steps());
  if (horizon > model.n_steps()) {
    throw std::invalid_argument("horizon exceeds the model's n_steps");
  }
  const std::size_t dim = model.dim();
  const std::size_t n0 = scheme.selection_period;
  const std::size_t epochs = (horizon + n0 - 1) / n0;
  const std::size_t workers = streams.thread_safe() ? options.workers : 1;
  const bool potential = scheme.is_potential();
  const double strength = scheme.strength();

  EnsembleHistory h;
  h.dim_ = dim;
  h.population_ = n_particles;
  h.horizon_ = horizon;
  h.scheme_ = scheme;
  h.v0_ = options.v0.value_or(model.initial_energy());
  h.has_genealogy_ = options.record_genealogy;
  h.log_eta_.reserve(epochs);

  const State x0 = model.initial_state();
  std::vector<double> current(n_particles * dim);
  for (std::size_t i = 0; i < n_particles; ++i) {
    std::copy(x0.begin(), x0.end(), current.begin() + i * dim);
  }
  std::vector<double> energy(n_particles, model.energy(x0));
  std::vector<double> log_corr(n_particles, 0.0);
  std::vector<double> parent_energy(n_particles, h.v0_);

  if (h.has_genealogy_) {
    h.states_.reserve(horizon + 1);
    h.states_.push_back(current);
    h.log_correction_.push_back(log_corr);
    h.parent_energy_.push_back(parent_energy);
    h.ancestors_.reserve(epochs);
  }

  std::vector<double> log_weights(n_particles);
  std::vector<double> next(n_particles * dim);
  std::vector<double> next_corr(n_particles);
  std::vector<double> next_parent(n_particles);
  std::vector<std::vector<double>> step_states;

  for (std::size_t k = 0; k < epochs; ++k) {
    const std::size_t t0 = k * n0;
    const std::size_t steps = std::min(n0, horizon - t0);

    for (std::size_t i = 0; i < n_particles; ++i) {
      log_weights[i] = potential ? strength * energy[i]
                                 : strength * (energy[i] - parent_energy[i]);
    }
    SelectionResult sel;
    try {
      sel = select(log_weights, streams, k);
    } catch (const EngineError& e) {
      std::ostringstream os;
      os << e.what() << " [time " << t0 << ", " << scheme.label() << "]";
      throw EngineError(os.str());
    }
    if (!std::isfinite(sel.log_eta)) {
      throw EngineError("non-finite normalizing constant at epoch " +
                        std::to_string(k));
    }

    for (std::size_t i = 0; i < n_particles; ++i) {
      const std::size_t j = sel.parents[i];
      if (potential) {
        next_corr[i] = log_corr[j] - strength * energy[j];
      } else {
        next_corr[i] = -strength * (energy[j] - h.v0_);
      }
      next_parent[i] = energy[j];
    }

    if (h.has_genealogy_) {
      step_states.assign(steps, std::vector<double>(n_particles * dim));
    }
    parallel_for(n_particles, workers, [&](std::size_t i) {
      RandomSource& rng = streams.stream(k, i, StreamPurpose::kMutation);
      const std::size_t j = sel.parents[i];
      std::vector<double> a(current.begin() + j * dim,
                            current.begin() + (j + 1) * dim);
      std::vector<double> b(dim);
      for (std::size_t s = 0; s < steps; ++s) {
        model.step(t0 + s, a, b, rng);
        if (h.has_genealogy_) {
          std::copy(b.begin(), b.end(), step_states[s].begin() + i * dim);
        }
        std::swap(a, b);
      }
      std::copy(a.begin(), a.end(), next.begin() + i * dim);
    });

    std::swap(current, next);
    std::swap(log_corr, next_corr);
    std::swap(parent_energy, next_parent);
    for (std::size_t i = 0; i < n_particles; ++i) {
      energy[i] = model.energy(
          std::span<const double>(current).subspan(i * dim, dim));
    }

    h.log_eta_.push_back(sel.log_eta);
    h.log_prod_eta_ += sel.log_eta;
    if (h.has_genealogy_) {
      h.ancestors_.push_back(std::move(sel.parents));
      for (auto& s : step_states) h.states_.push_back(std::move(s));
      h.log_correction_.push_back(log_corr);
      h.parent_energy_.push_back(parent_energy);
    }
  }

  if (!h.has_genealogy_) {
    h.states_.push_back(current);
    h.log_correction_.push_back(log_corr);
    h.parent_energy_.push_back(parent_energy);
  }
  h.final_energy_ = std::move(energy);
  return h;
}

}  // namespace rareips

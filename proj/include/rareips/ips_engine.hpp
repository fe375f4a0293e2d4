#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rareips/chain_model.hpp"
#include "rareips/rng.hpp"

namespace rareips {

// G_p = exp(beta * V(x_p)).
struct PotentialWeights {
  double beta = 0.0;
};

// G_p = exp(alpha * (V(x_p) - V(x at the previous selection))).
struct IncrementWeights {
  double alpha = 0.0;
};

/// Selection potential plus the selection period n0. Potentials are only
/// evaluated at selection epochs t = 0, n0, 2 n0, ...; between them each
/// particle takes n0 raw kernel steps. When n0 does not divide the horizon
/// the last interval is shorter and is not followed by a selection.
struct WeightScheme {
  std::variant<PotentialWeights, IncrementWeights> weights;
  std::size_t selection_period = 1;

  static WeightScheme potential(double beta, std::size_t period = 1);
  static WeightScheme increment(double alpha, std::size_t period = 1);

  bool is_potential() const {
    return std::holds_alternative<PotentialWeights>(weights);
  }
  // beta or alpha, whichever is active.
  double strength() const;
  std::string label() const;

  void validate() const;
};

struct EngineOptions {
  std::size_t population = 0;
  // Keep per-step snapshots and ancestor indices. Needed for ancestral lines
  // and conditional statistics; probability estimates do not need them.
  bool record_genealogy = true;
  // Mutation worker threads. Results do not depend on this.
  std::size_t workers = 1;
  // Run only the first `horizon` steps of the model (defaults to n_steps()).
  std::optional<std::size_t> horizon;
  // Energy anchor V0 for increment weights (defaults to V(x_0)).
  std::optional<double> v0;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One particle as seen at a checkpoint (a selection time or the horizon).
struct Particle {
  State state;
  // log of the factor multiplying the indicator in the final estimator:
  // log Y for potential weights, -alpha (V(parent) - V0) for increments.
  double log_correction = 0.0;
  // V of this particle's line at the previous selection epoch.
  double parent_energy = 0.0;
  // Index, in the previous checkpoint's ensemble, of the selected parent.
  // Empty at checkpoint 0 and when genealogy is not recorded.
  std::optional<std::size_t> ancestor;
};

/// The genealogical record of one run.
///
/// Times run 0..horizon. Epoch k selects at time k * n0 and is followed by
/// up to n0 mutation steps. Checkpoint c is the ensemble at time
/// min(c * n0, horizon), i.e. just before selection c or at the horizon.
/// States at times in (t_k, t_{k+1}] are indexed by the post-selection
/// particle index of epoch k.
class EnsembleHistory {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t population() const { return population_; }
  std::size_t horizon() const { return horizon_; }
  const WeightScheme& scheme() const { return scheme_; }
  double v0() const { return v0_; }
  bool has_genealogy() const { return has_genealogy_; }

  std::size_t epoch_count() const { return log_eta_.size(); }
  std::size_t epoch_time(std::size_t epoch) const;
  std::size_t checkpoint_time(std::size_t checkpoint) const;

  double log_eta(std::size_t epoch) const { return log_eta_.at(epoch); }
  std::span<const double> log_etas() const { return log_eta_; }
  // Sum of log eta over all epochs, accumulated in epoch order.
  double log_prod_eta() const { return log_prod_eta_; }

  std::span<const std::size_t> ancestors(std::size_t epoch) const;

  // Requires genealogy for t < horizon.
  std::span<const double> state(std::size_t time, std::size_t particle) const;

  std::span<const double> final_state(std::size_t particle) const;
  double final_energy(std::size_t particle) const {
    return final_energy_.at(particle);
  }
  std::span<const double> final_energies() const { return final_energy_; }
  std::span<const double> final_log_corrections() const {
    return log_correction_.back();
  }

  // Requires genealogy unless `checkpoint` is the last one.
  Particle particle(std::size_t checkpoint, std::size_t index) const;

  // Columnar CSV dump, one row per (time, particle). See README.
  void write_dump(std::ostream& out) const;

 private:
  friend EnsembleHistory run_ips(const ChainModel&, const WeightScheme&,
                                 const EngineOptions&, StreamFactory&);

  void require_genealogy(const char* what) const;

  std::size_t dim_ = 0;
  std::size_t population_ = 0;
  std::size_t horizon_ = 0;
  WeightScheme scheme_;
  double v0_ = 0.0;
  bool has_genealogy_ = false;

  std::vector<double> log_eta_;
  double log_prod_eta_ = 0.0;
  // [epoch][particle]; empty without genealogy.
  std::vector<std::vector<std::size_t>> ancestors_;
  // [time][particle * dim + coord]; only the final time without genealogy.
  std::vector<std::vector<double>> states_;
  // [checkpoint][particle]; only the final checkpoint without genealogy.
  std::vector<std::vector<double>> log_correction_;
  std::vector<std::vector<double>> parent_energy_;
  std::vector<double> final_energy_;
};

struct SelectionResult {
  // parents[i] is the pre-selection index copied into slot i.
  std::vector<std::size_t> parents;
  // log of (1/N) sum_i G_i.
  double log_eta = 0.0;
};

/// Multinomial resampling from the Boltzmann-Gibbs distribution with
/// probabilities proportional to exp(log_weights). Slot i draws one uniform
/// from the selection stream at (epoch, i). Throws EngineError on a
/// non-finite weight.
SelectionResult select(std::span<const double> log_weights,
                       StreamFactory& streams, std::uint64_t epoch);

// Normalized selection probabilities, reduced in index order.
std::vector<double> selection_probabilities(std::span<const double> log_weights);

// log(sum exp(x)) with the maximum factored out; -inf for an empty range.
double log_sum_exp(std::span<const double> x);

EnsembleHistory run_ips(const ChainModel& model, const WeightScheme& scheme,
                        const EngineOptions& options, StreamFactory& streams);

}  // namespace rareips

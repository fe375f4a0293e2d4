#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rareips/chain_model.hpp"
#include "rareips/ips_engine.hpp"

namespace rareips {

// Half-open set [lo, hi) on the energy axis. hi = +inf gives a ray and
// lo = -inf, hi = +inf the whole line.
class Target {
 public:
  static Target interval(double a, double delta_a);
  static Target ray(double a);
  static Target whole_line();
  // [lo, hi) with explicit edges; used for histogram bins.
  static Target between(double lo, double hi);

  bool contains(double v) const { return lo_ <= v && v < hi_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }

 private:
  Target(double lo, double hi) : lo_(lo), hi_(hi) {}
  double lo_;
  double hi_;
};

// A functional of the full path (x_0, ..., x_n).
using PathFunctional = std::function<double(const std::vector<State>&)>;

struct RareEventQuery {
  Target target = Target::whole_line();
  PathFunctional path_functional;
};

struct EstimateResult {
  double p_hat = 0.0;
  // N times the estimated variance of p_hat.
  double q_hat = 0.0;
  std::size_t hits = 0;
  // log p_hat, -inf when extinct.
  double log_p_hat = -std::numeric_limits<double>::infinity();
  double log_prod_eta = 0.0;
  bool extinct = true;
};

enum class VarianceForm {
  // q = mean(1_A w^2) Z^2, the interacting-particle estimator.
  kSecondMoment,
  // q = mean(1_A w^2) - p^2, for independent weighted samples.
  kCentered,
};

/// Final energies and per-sample log weights from any of the estimators;
/// p_A = (1/N) sum_{V_i in A} exp(log_weights[i] + log_normalizer).
struct WeightedSample {
  std::vector<double> energies;
  std::vector<double> log_weights;
  double log_normalizer = 0.0;
  VarianceForm variance_form = VarianceForm::kSecondMoment;

  std::size_t size() const { return energies.size(); }
};

WeightedSample final_sample(const EnsembleHistory& history);

EstimateResult estimate(const WeightedSample& sample, const Target& target);

// Same reduction over an explicit, ascending set of sample indices.
EstimateResult estimate_members(const WeightedSample& sample,
                                std::span<const std::size_t> members);

EstimateResult estimate_probability(const EnsembleHistory& history,
                                    const Target& target);

struct PdfBinEstimate {
  double density = 0.0;
  double p2 = 0.0;
  EstimateResult probability;
};

// Density on [a, a + delta_a): P / delta_a, with p2 = sqrt(q / delta_a).
PdfBinEstimate estimate_pdf_bin(const WeightedSample& sample, double a,
                                double delta_a);
PdfBinEstimate estimate_pdf_bin(const EnsembleHistory& history, double a,
                                double delta_a);

struct ConditionalEstimate {
  double value = 0.0;
  // sqrt(E[phi^2 | A] - E[phi | A]^2) under the same weights.
  double spread = 0.0;
  std::size_t hits = 0;
  bool extinct = true;
};

/// Weighted average of query.path_functional over the ancestral lines of the
/// final particles in query.target. Requires genealogy.
ConditionalEstimate conditional_expectation(const EnsembleHistory& history,
                                            const RareEventQuery& query);

// (x_0, ..., x_n) for a final particle, following ancestor indices back.
std::vector<State> ancestral_line(const EnsembleHistory& history,
                                  std::size_t final_particle);

// phi(path) = V(x_p).
PathFunctional energy_at(const ChainModel& model, std::size_t p);

}  // namespace rareips

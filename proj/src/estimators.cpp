#include "rareips/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rareips {

Target Target::interval(double a, double delta_a) {
  if (!std::isfinite(a)) throw std::invalid_argument("target level must be finite");
  if (!(delta_a > 0.0) || !std::isfinite(delta_a)) {
    throw std::invalid_argument("delta_a must be finite and > 0");
  }
  return Target(a, a + delta_a);
}

Target Target::ray(double a) {
  if (!std::isfinite(a)) throw std::invalid_argument("target level must be finite");
  return Target(a, std::numeric_limits<double>::infinity());
}

Target Target::whole_line() {
  return Target(-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity());
}

Target Target::between(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("target needs lo < hi");
  return Target(lo, hi);
}

WeightedSample final_sample(const EnsembleHistory& history) {
  WeightedSample s;
  const auto e = history.final_energies();
  const auto c = history.final_log_corrections();
  s.energies.assign(e.begin(), e.end());
  s.log_weights.assign(c.begin(), c.end());
  s.log_normalizer = history.log_prod_eta();
  s.variance_form = VarianceForm::kSecondMoment;
  return s;
}

EstimateResult estimate_members(const WeightedSample& sample,
                                std::span<const std::size_t> members) {
  if (sample.energies.size() != sample.log_weights.size()) {
    throw std::invalid_argument("sample energies and weights differ in size");
  }
  EstimateResult r;
  r.log_prod_eta = sample.log_normalizer;
  r.hits = members.size();
  if (r.hits == 0) return r;

  std::vector<double> first(members.size());
  std::vector<double> second(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    first[k] = sample.log_weights[members[k]];
    second[k] = 2.0 * first[k];
  }
  const double log_n = std::log(static_cast<double>(sample.size()));
  r.extinct = false;
  r.log_p_hat = log_sum_exp(first) - log_n + sample.log_normalizer;
  r.p_hat = std::exp(r.log_p_hat);
  const double m2 = std::exp(log_sum_exp(second) - log_n +
                             2.0 * sample.log_normalizer);
  r.q_hat = sample.variance_form == VarianceForm::kSecondMoment
                ? m2
                : std::max(0.0, m2 - r.p_hat * r.p_hat);
  return r;
}

EstimateResult estimate(const WeightedSample& sample, const Target& target) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (target.contains(sample.energies[i])) members.push_back(i);
  }
  return estimate_members(sample, members);
}

EstimateResult estimate_probability(const EnsembleHistory& history,
                                    const Target& target) {
  return estimate(final_sample(history), target);
}

PdfBinEstimate estimate_pdf_bin(const WeightedSample& sample, double a,
                                double delta_a) {
  PdfBinEstimate b;
  b.probability = estimate(sample, Target::interval(a, delta_a));
  b.density = b.probability.p_hat / delta_a;
  b.p2 = std::sqrt(b.probability.q_hat / delta_a);
  return b;
}

PdfBinEstimate estimate_pdf_bin(const EnsembleHistory& history, double a,
                                double delta_a) {
  return estimate_pdf_bin(final_sample(history), a, delta_a);
}

std::vector<State> ancestral_line(const EnsembleHistory& history,
                                  std::size_t final_particle) {
  if (final_particle >= history.population()) {
    throw std::out_of_range("final particle index out of range");
  }
  if (!history.has_genealogy()) {
    throw std::logic_error("ancestral lines require record_genealogy");
  }
  const std::size_t n = history.horizon();
  const std::size_t n0 = history.scheme().selection_period;
  std::vector<State> path(n + 1);
  std::size_t idx = final_particle;
  for (std::size_t t = n;; --t) {
    const auto x = history.state(t, idx);
    path[t].assign(x.begin(), x.end());
    if (t == 0) break;
    // Moving back onto a selection time switches to the parent's index.
    if ((t - 1) % n0 == 0) idx = history.ancestors((t - 1) / n0)[idx];
  }
  return path;
}

ConditionalEstimate conditional_expectation(const EnsembleHistory& history,
                                            const RareEventQuery& query) {
  if (!query.path_functional) {
    throw std::invalid_argument("conditional expectation needs a path functional");
  }
  const auto energies = history.final_energies();
  const auto corr = history.final_log_corrections();
  std::vector<std::size_t> hits;
  double max_corr = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (query.target.contains(energies[i])) {
      hits.push_back(i);
      max_corr = std::max(max_corr, corr[i]);
    }
  }
  ConditionalEstimate r;
  r.hits = hits.size();
  if (hits.empty()) return r;
  r.extinct = false;

  double w_sum = 0.0;
  double phi_sum = 0.0;
  double phi2_sum = 0.0;
  for (std::size_t i : hits) {
    const double w = std::exp(corr[i] - max_corr);
    const double phi = query.path_functional(ancestral_line(history, i));
    w_sum += w;
    phi_sum += w * phi;
    phi2_sum += w * phi * phi;
  }
  r.value = phi_sum / w_sum;
  r.spread = std::sqrt(std::max(0.0, phi2_sum / w_sum - r.value * r.value));
  return r;
}

PathFunctional energy_at(const ChainModel& model, std::size_t p) {
  return [&model, p](const std::vector<State>& path) {
    return model.energy(path.at(p));
  };
}

}  // namespace rareips

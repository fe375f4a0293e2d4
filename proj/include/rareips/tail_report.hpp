#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rareips/estimators.hpp"
#include "rareips/ips_engine.hpp"

namespace rareips {

class ReportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Contiguous bins [a_min + k delta_a, a_min + (k+1) delta_a) covering
// [a_min, a_max]; the last bin may overhang a_max by less than delta_a.
struct BinSpec {
  double a_min = 0.0;
  double a_max = 0.0;
  double delta_a = 0.0;

  void validate() const;
  std::size_t count() const;
  double lo(std::size_t k) const;
  double hi(std::size_t k) const { return lo(k + 1); }
};

struct TailBin {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double p_hat = 0.0;  // density estimate
  double p2_hat = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
  std::string source;

  // p2 / p, the relative-error figure used for combination; +inf if empty.
  double ratio() const;
};

struct ReportMetadata {
  std::string model;
  std::string scheme;
  std::size_t population = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  double delta_a = 0.0;
};

struct TailReport {
  std::vector<TailBin> bins;
  ReportMetadata metadata;
};

/// Evaluates every bin against one weighted sample. Bin k gets exactly the
/// estimate that `estimate` returns for [lo(k), hi(k)); the shared
/// normalizing constant enters every bin identically.
TailReport build_report(const WeightedSample& sample, const BinSpec& bins,
                        const ReportMetadata& metadata,
                        const std::string& source_label);

TailReport build_report(const EnsembleHistory& history, const BinSpec& bins,
                        const ReportMetadata& metadata,
                        const std::string& source_label);

// Per bin, keeps the input with the smallest p2/p among those with at least
// `min_hits` hits; if none qualifies, the smallest ratio among non-empty
// inputs. Bins empty everywhere stay empty. Inputs must share bin edges and
// model.
TailReport combine_reports(const std::vector<TailReport>& reports,
                           std::size_t min_hits = 5);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// p +- z * stderr, lower end clipped at 0.
ConfidenceInterval normal_interval(const TailBin& bin, double z = 1.96);
// p * exp(+-z * stderr / p), for log-scale plots. Zero for empty bins.
ConfidenceInterval log_interval(const TailBin& bin, double z = 1.96);

inline constexpr const char* kReportHeader =
    "a_lo,a_hi,p_hat,p2_hat,stderr,hits,source";

void write_report_csv(std::ostream& out, const TailReport& report);
TailReport read_report_csv(std::istream& in);

// a_lo,a_hi,p_hat,ci_lower,ci_upper,log_ci_lower,log_ci_upper
void write_intervals_csv(std::ostream& out, const TailReport& report,
                         double z = 1.96);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace rareips

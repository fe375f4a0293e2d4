#include "rareips/tail_report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rareips {

void BinSpec::validate() const {
  if (!std::isfinite(a_min) || !std::isfinite(a_max) || !(a_max > a_min)) {
    throw ReportError("bin spec needs finite a_min < a_max");
  }
  if (!std::isfinite(delta_a) || !(delta_a > 0.0)) {
    throw ReportError("bin spec needs finite delta_a > 0");
  }
}

std::size_t BinSpec::count() const {
  validate();
  const double raw = (a_max - a_min) / delta_a;
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

double BinSpec::lo(std::size_t k) const {
  return a_min + static_cast<double>(k) * delta_a;
}

double TailBin::ratio() const {
  if (hits == 0 || !(p_hat > 0.0)) return std::numeric_limits<double>::infinity();
  return p2_hat / p_hat;
}

TailReport build_report(const WeightedSample& sample, const BinSpec& bins,
                        const ReportMetadata& metadata,
                        const std::string& source_label) {
  const std::size_t count = bins.count();
  const double n = static_cast<double>(sample.size());
  TailReport report;
  report.metadata = metadata;
  report.metadata.delta_a = bins.delta_a;

  // Bucket sample indices by bin, preserving index order so each bin's
  // reduction matches a direct evaluation of the same interval.
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double v = sample.energies[i];
    if (!(v >= bins.lo(0)) || !(v < bins.hi(count - 1))) continue;
    auto k = static_cast<std::size_t>(std::floor((v - bins.a_min) / bins.delta_a));
    k = std::min(k, count - 1);
    while (k > 0 && v < bins.lo(k)) --k;
    while (k + 1 < count && v >= bins.hi(k)) ++k;
    members[k].push_back(i);
  }

  report.bins.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    TailBin bin;
    bin.a_lo = bins.lo(k);
    bin.a_hi = bins.hi(k);
    bin.source = source_label;
    const EstimateResult r = estimate_members(sample, members[k]);
    bin.hits = r.hits;
    bin.p_hat = r.p_hat / bins.delta_a;
    bin.p2_hat = std::sqrt(r.q_hat / bins.delta_a);
    bin.std_error = bin.p2_hat / std::sqrt(n * bins.delta_a);
    report.bins.push_back(std::move(bin));
  }
  return report;
}

TailReport build_report(const EnsembleHistory& history, const BinSpec& bins,
                        const ReportMetadata& metadata,
                        const std::string& source_label) {
  return build_report(final_sample(history), bins, metadata, source_label);
}

namespace {

void check_compatible(const TailReport& ref, const TailReport& other) {
  if (ref.bins.size() != other.bins.size()) {
    throw ReportError("cannot combine reports with different bin counts (" +
                      std::to_string(ref.bins.size()) + " vs " +
                      std::to_string(other.bins.size()) + ")");
  }
  for (std::size_t k = 0; k < ref.bins.size(); ++k) {
    if (ref.bins[k].a_lo != other.bins[k].a_lo ||
        ref.bins[k].a_hi != other.bins[k].a_hi) {
      throw ReportError("cannot combine reports: bin " + std::to_string(k) +
                        " edges differ");
    }
  }
  if (!ref.metadata.model.empty() && !other.metadata.model.empty() &&
      ref.metadata.model != other.metadata.model) {
    throw ReportError("cannot combine reports for different models ('" +
                      ref.metadata.model + "' vs '" + other.metadata.model +
                      "')");
  }
}

}  // namespace

TailReport combine_reports(const std::vector<TailReport>& reports,
                           std::size_t min_hits) {
  if (reports.empty()) throw ReportError("nothing to combine");
  if (reports.size() == 1) return reports.front();
  for (std::size_t r = 1; r < reports.size(); ++r) {
    check_compatible(reports.front(), reports[r]);
  }

  TailReport out;
  out.metadata = reports.front().metadata;
  out.metadata.scheme = "combined";
  out.bins.reserve(reports.front().bins.size());
  for (std::size_t k = 0; k < reports.front().bins.size(); ++k) {
    const TailBin* best = nullptr;
    for (std::size_t floor : {min_hits, std::size_t{1}}) {
      for (const auto& report : reports) {
        const TailBin& b = report.bins[k];
        if (b.hits < floor || !std::isfinite(b.ratio())) continue;
        if (best == nullptr || b.ratio() < best->ratio()) best = &b;
      }
      if (best != nullptr) break;
    }
    out.bins.push_back(best != nullptr ? *best : reports.front().bins[k]);
  }
  return out;
}

ConfidenceInterval normal_interval(const TailBin& bin, double z) {
  return {std::max(0.0, bin.p_hat - z * bin.std_error),
          bin.p_hat + z * bin.std_error};
}

ConfidenceInterval log_interval(const TailBin& bin, double z) {
  if (!(bin.p_hat > 0.0)) return {0.0, 0.0};
  const double rel = z * bin.std_error / bin.p_hat;
  return {bin.p_hat * std::exp(-rel), bin.p_hat * std::exp(rel)};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string clean_label(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

double parse_double(std::string_view text, std::size_t line, const char* col) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ReportError("report line " + std::to_string(line) + ": bad " + col +
                      " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void write_report_csv(std::ostream& out, const TailReport& report) {
  out << kReportHeader << '\n';
  for (const auto& b : report.bins) {
    out << format_double(b.a_lo) << ',' << format_double(b.a_hi) << ','
        << format_double(b.p_hat) << ',' << format_double(b.p2_hat) << ','
        << format_double(b.std_error) << ',' << b.hits << ','
        << clean_label(b.source) << '\n';
  }
}

TailReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw ReportError(std::string("report must start with header '") +
                      kReportHeader + "'");
  }
  TailReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (int i = 0; i < 6; ++i) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) {
        throw ReportError("report line " + std::to_string(line_no) +
                          ": expected 7 columns");
      }
      cols.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    TailBin b;
    b.a_lo = parse_double(cols[0], line_no, "a_lo");
    b.a_hi = parse_double(cols[1], line_no, "a_hi");
    b.p_hat = parse_double(cols[2], line_no, "p_hat");
    b.p2_hat = parse_double(cols[3], line_no, "p2_hat");
    b.std_error = parse_double(cols[4], line_no, "stderr");
    std::size_t hits = 0;
    const auto res =
        std::from_chars(cols[5].data(), cols[5].data() + cols[5].size(), hits);
    if (res.ec != std::errc() || res.ptr != cols[5].data() + cols[5].size()) {
      throw ReportError("report line " + std::to_string(line_no) +
                        ": bad hits '" + std::string(cols[5]) + "'");
    }
    b.hits = hits;
    b.source = std::string(rest);
    if (!report.bins.empty() && report.bins.back().a_hi != b.a_lo) {
      throw ReportError("report line " + std::to_string(line_no) +
                        ": bins are not contiguous");
    }
    report.bins.push_back(std::move(b));
  }
  if (!report.bins.empty()) {
    report.metadata.delta_a = report.bins.front().a_hi - report.bins.front().a_lo;
  }
  return report;
}

void write_intervals_csv(std::ostream& out, const TailReport& report,
                         double z) {
  out << "a_lo,a_hi,p_hat,ci_lower,ci_upper,log_ci_lower,log_ci_upper\n";
  for (const auto& b : report.bins) {
    const auto ci = normal_interval(b, z);
    const auto li = log_interval(b, z);
    out << format_double(b.a_lo) << ',' << format_double(b.a_hi) << ','
        << format_double(b.p_hat) << ',' << format_double(ci.lower) << ','
        << format_double(ci.upper) << ',' << format_double(li.lower) << ','
        << format_double(li.upper) << '\n';
  }
}

}  // namespace rareips

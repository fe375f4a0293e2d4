#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rareips/baselines.hpp"
#include "rareips/ips_engine.hpp"
#include "rareips/tail_report.hpp"
#include "test_support.hpp"

namespace rareips {
namespace {

ReportMetadata meta(const std::string& scheme) {
  return {"gaussian", scheme, 1000, 15, 1, 0.5};
}

TailBin bin(double lo, double p, double p2, std::size_t hits, const std::string& src) {
  TailBin b;
  b.a_lo = lo;
  b.a_hi = lo + 1.0;
  b.p_hat = p;
  b.p2_hat = p2;
  b.std_error = hits ? p2 / std::sqrt(1000.0) : 0.0;
  b.hits = hits;
  b.source = src;
  return b;
}

TailReport report_of(const std::string& scheme, std::vector<TailBin> bins) {
  return {std::move(bins), meta(scheme)};
}

TEST(BinSpec, CountAndEdges) {
  BinSpec s{0.0, 10.0, 0.5};
  EXPECT_EQ(s.count(), 20u);
  EXPECT_EQ(s.lo(3), 1.5);
  EXPECT_EQ(s.hi(19), 10.0);
  BinSpec overhang{0.0, 10.2, 0.5};
  EXPECT_EQ(overhang.count(), 21u);
  BinSpec tenth{0.0, 8.0, 0.1};
  EXPECT_EQ(tenth.count(), 80u);
  EXPECT_THROW((BinSpec{1.0, 0.0, 0.5}.validate()), ReportError);
  EXPECT_THROW((BinSpec{0.0, 1.0, 0.0}.validate()), ReportError);
  EXPECT_THROW((BinSpec{0.0, std::nan(""), 0.1}.validate()), ReportError);
}

TEST(BuildReport, BinsMatchDirectEstimates) {
  GaussianWalkModel walk(15);
  CounterStreamFactory streams(1, 0);
  EngineOptions o;
  o.population = 2000;
  o.record_genealogy = false;
  const auto h = run_ips(walk, WeightScheme::increment(0.7), o, streams);
  const BinSpec spec{-4.0, 16.0, 0.5};
  const auto rep = build_report(h, spec, meta("ips-inc"), "alpha=0.7");
  ASSERT_EQ(rep.bins.size(), spec.count());
  const auto sample = final_sample(h);
  for (std::size_t k = 0; k < rep.bins.size(); ++k) {
    const auto direct = estimate(sample, Target::between(spec.lo(k), spec.hi(k)));
    EXPECT_EQ(rep.bins[k].hits, direct.hits);
    EXPECT_NEAR(rep.bins[k].p_hat * 0.5, direct.p_hat, 1e-15 + 1e-12 * direct.p_hat);
    EXPECT_EQ(rep.bins[k].source, "alpha=0.7");
    if (direct.hits) {
      EXPECT_NEAR(rep.bins[k].p2_hat, std::sqrt(direct.q_hat / 0.5),
                  1e-12 * rep.bins[k].p2_hat);
      EXPECT_NEAR(rep.bins[k].std_error, rep.bins[k].p2_hat / std::sqrt(2000.0 * 0.5),
                  1e-12 * rep.bins[k].std_error);
    }
  }
}

TEST(BuildReport, MergingBinsIsAdditive) {
  GaussianWalkModel walk(15);
  CounterStreamFactory streams(2, 0);
  EngineOptions o;
  o.population = 2000;
  o.record_genealogy = false;
  const auto h = run_ips(walk, WeightScheme::potential(0.1), o, streams);
  const auto fine = build_report(h, BinSpec{0.0, 12.0, 0.25}, meta("ips-pot"), "f");
  const auto coarse = build_report(h, BinSpec{0.0, 12.0, 1.0}, meta("ips-pot"), "c");
  for (std::size_t k = 0; k < coarse.bins.size(); ++k) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t j = 4 * k; j < 4 * k + 4; ++j) {
      sum += fine.bins[j].p_hat * 0.25;
      hits += fine.bins[j].hits;
    }
    EXPECT_EQ(coarse.bins[k].hits, hits);
    EXPECT_NEAR(coarse.bins[k].p_hat, sum, 1e-12 * sum + 1e-300);
  }
}

TEST(BuildReport, EmptyBinsHaveZeroEstimates) {
  GaussianWalkModel walk(15);
  CounterStreamFactory streams(3, 0);
  const auto s = mc_sample(walk, 100, streams);
  const auto rep = build_report(s, BinSpec{50.0, 52.0, 1.0}, meta("mc"), "mc");
  for (const auto& b : rep.bins) {
    EXPECT_EQ(b.hits, 0u);
    EXPECT_EQ(b.p_hat, 0.0);
    EXPECT_TRUE(std::isinf(b.ratio()));
  }
}

TEST(Combine, SingleReportIsUnchanged) {
  const auto r = report_of("mc", {bin(0, 0.2, 0.5, 100, "mc"), bin(1, 0.0, 0.0, 0, "mc")});
  const auto c = combine_reports({r});
  ASSERT_EQ(c.bins.size(), 2u);
  EXPECT_EQ(c.bins[0].p_hat, 0.2);
  EXPECT_EQ(c.bins[0].source, "mc");
  EXPECT_EQ(c.metadata.scheme, "mc");
}

TEST(Combine, PicksSmallestRatioPerBin) {
  const auto mc = report_of("mc", {bin(0, 0.2, 0.4, 500, "mc"), bin(1, 1e-4, 1e-2, 6, "mc")});
  const auto ips =
      report_of("ips", {bin(0, 0.21, 1.0, 50, "ips"), bin(1, 1.1e-4, 5e-4, 300, "ips")});
  const auto c = combine_reports({mc, ips});
  EXPECT_EQ(c.bins[0].source, "mc");
  EXPECT_EQ(c.bins[1].source, "ips");
  EXPECT_EQ(c.bins[1].p_hat, 1.1e-4);
  EXPECT_EQ(c.metadata.scheme, "combined");
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_LE(c.bins[k].ratio(), mc.bins[k].ratio());
    EXPECT_LE(c.bins[k].ratio(), ips.bins[k].ratio());
  }
}

TEST(Combine, MinHitsGuardAndFallback) {
  // Bin 0: the low-hit input has the better ratio but is skipped.
  // Bin 1: nobody reaches min_hits, so the best non-empty input wins.
  // Bin 2: empty everywhere.
  const auto a = report_of("a", {bin(0, 1.0, 0.1, 2, "a"), bin(1, 1.0, 3.0, 2, "a"),
                                 bin(2, 0, 0, 0, "a")});
  const auto b = report_of("b", {bin(0, 1.0, 2.0, 50, "b"), bin(1, 1.0, 5.0, 3, "b"),
                                 bin(2, 0, 0, 0, "b")});
  const auto c = combine_reports({a, b}, 5);
  EXPECT_EQ(c.bins[0].source, "b");
  EXPECT_EQ(c.bins[1].source, "a");
  EXPECT_EQ(c.bins[2].hits, 0u);
  EXPECT_EQ(c.bins[2].p_hat, 0.0);
}

TEST(Combine, RejectsMismatchedInputs) {
  const auto a = report_of("a", {bin(0, 1.0, 1.0, 10, "a")});
  const auto b = report_of("b", {bin(0.5, 1.0, 1.0, 10, "b")});
  EXPECT_THROW(combine_reports({a, b}), ReportError);
  auto c = a;
  c.metadata.model = "pmd";
  EXPECT_THROW(combine_reports({a, c}), ReportError);
  const auto d = report_of("d", {bin(0, 1.0, 1.0, 10, "d"), bin(1, 1.0, 1.0, 10, "d")});
  EXPECT_THROW(combine_reports({a, d}), ReportError);
  EXPECT_THROW(combine_reports({}), ReportError);
}

TEST(Combine, McBulkAndIpsTail) {
  GaussianWalkModel walk(15);
  const BinSpec spec{0.0, 20.0, 1.0};
  CounterStreamFactory s1(4, 0), s2(4, 1);
  const auto mc = build_report(mc_sample(walk, 10000, s1), spec, meta("mc"), "mc");
  EngineOptions o;
  o.population = 10000;
  o.record_genealogy = false;
  const auto ips = build_report(run_ips(walk, WeightScheme::increment(1.0), o, s2), spec,
                                meta("ips"), "ips");
  const auto c = combine_reports({mc, ips});
  EXPECT_EQ(c.bins[0].source, "mc");
  EXPECT_EQ(c.bins[15].source, "ips");
}

TEST(Intervals, NormalAndLogForms) {
  const auto b = bin(0, 1e-3, 0.0, 10, "x");
  auto t = b;
  t.std_error = 2e-3;
  const auto ni = normal_interval(t);
  EXPECT_EQ(ni.lower, 0.0);
  EXPECT_NEAR(ni.upper, 1e-3 + 1.96 * 2e-3, 1e-18);
  const auto li = log_interval(t);
  EXPECT_NEAR(li.lower, 1e-3 * std::exp(-1.96 * 2.0), 1e-15);
  EXPECT_NEAR(li.upper, 1e-3 * std::exp(1.96 * 2.0), 1e-12);
  const auto empty = log_interval(bin(0, 0, 0, 0, "x"));
  EXPECT_EQ(empty.lower, 0.0);
  EXPECT_EQ(empty.upper, 0.0);
}

TEST(Csv, RoundTripIsExact) {
  const auto r = report_of("ips", {bin(0, 0.1 + 0.2, 1.0 / 3.0, 7, "alpha=0.5"),
                                   bin(1, 1.2345678901234567e-11, 3e-9, 2, "beta=0.1"),
                                   bin(2, 0.0, 0.0, 0, "none")});
  std::ostringstream os;
  write_report_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kReportHeader);
  std::istringstream in(os.str());
  const auto back = read_report_csv(in);
  ASSERT_EQ(back.bins.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(back.bins[k].a_lo, r.bins[k].a_lo);
    EXPECT_EQ(back.bins[k].a_hi, r.bins[k].a_hi);
    EXPECT_EQ(back.bins[k].p_hat, r.bins[k].p_hat);
    EXPECT_EQ(back.bins[k].p2_hat, r.bins[k].p2_hat);
    EXPECT_EQ(back.bins[k].std_error, r.bins[k].std_error);
    EXPECT_EQ(back.bins[k].hits, r.bins[k].hits);
    EXPECT_EQ(back.bins[k].source, r.bins[k].source);
  }
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_report_csv(bad_header), ReportError);
  std::istringstream short_row(std::string(kReportHeader) + "\n0,1,0.5\n");
  EXPECT_THROW(read_report_csv(short_row), ReportError);
  std::istringstream gap(std::string(kReportHeader) +
                         "\n0,1,0.5,0.1,0.01,3,x\n2,3,0.5,0.1,0.01,3,x\n");
  EXPECT_THROW(read_report_csv(gap), ReportError);
}

TEST(Csv, IntervalsFile) {
  const auto r = report_of("ips", {bin(0, 0.5, 1.0, 7, "x")});
  std::ostringstream os;
  write_intervals_csv(os, r);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "a_lo,a_hi,p_hat,ci_lower,ci_upper,log_ci_lower,log_ci_upper");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(std::stod(format_double(1.2345678901234567e-11)), 1.2345678901234567e-11);
}

}  // namespace
}  // namespace rareips

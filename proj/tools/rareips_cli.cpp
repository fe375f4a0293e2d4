#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rareips/analytics.hpp"
#include "rareips/ips_engine.hpp"
#include "rareips/run_config.hpp"
#include "rareips/runner.hpp"
#include "rareips/tail_report.hpp"

namespace {

using rareips::format_double;
namespace analytics = rareips::analytics;

int cmd_run(const std::string& config_path) {
  const rareips::RunConfig config = rareips::load_config(config_path);
  const auto result = rareips::execute(config);
  std::cout << "wrote " << result.report_files.size() << " report(s), "
            << result.combined_file.string() << " and "
            << result.manifest_file.string() << '\n';
  return 0;
}

int cmd_combine(const std::vector<std::string>& inputs,
                const std::string& output, std::size_t min_hits) {
  std::vector<rareips::TailReport> reports;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read report '" + path + "'");
    reports.push_back(rareips::read_report_csv(in));
  }
  const auto combined = rareips::combine_reports(reports, min_hits);
  std::ostringstream os;
  rareips::write_report_csv(os, combined);
  rareips::write_file_atomic(output, os.str());
  return 0;
}

struct Grid {
  double a_min = 0.0;
  double a_max = 20.0;
  double step = 0.25;

  std::vector<double> points() const {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((a_max - a_min) / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) out.push_back(a_min + static_cast<double>(k) * step);
    return out;
  }
};

void print_gaussian(std::size_t n, const Grid& grid,
                    const std::vector<double>& alphas,
                    const std::vector<double>& betas) {
  std::cout << "a,pdf,tail";
  for (double a : alphas) std::cout << ",p2_over_p_alpha=" << format_double(a);
  for (double b : betas) std::cout << ",p2_over_p_beta=" << format_double(b);
  std::cout << '\n';
  for (double a : grid.points()) {
    const double p = analytics::gaussian_pdf(n, a);
    std::cout << format_double(a) << ',' << format_double(p) << ','
              << format_double(analytics::gaussian_tail_exact(n, a));
    for (double al : alphas) {
      std::cout << ',' << format_double(analytics::gaussian_p2_alpha(n, a, al) / p);
    }
    for (double be : betas) {
      std::cout << ',' << format_double(analytics::gaussian_p2_beta(n, a, be) / p);
    }
    std::cout << '\n';
  }
}

void print_pmd(std::size_t n, double sigma, const Grid& grid) {
  std::cout << "a,maxwellian_pdf\n";
  for (double a : grid.points()) {
    if (a < 0.0) continue;
    std::cout << format_double(a) << ','
              << format_double(analytics::maxwellian_dgd_pdf(sigma, n, a)) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-event tail estimation with interacting particle systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rareips::kVersion);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute a run configuration");
  run->add_option("config", config_path, "JSON run configuration")->required();

  std::vector<std::string> inputs;
  std::string combined_out;
  std::size_t min_hits = 5;
  auto* combine = app.add_subcommand(
      "combine", "Keep, per bin, the report with the smallest p2/p");
  combine->add_option("reports", inputs, "Report CSV files")->required();
  combine->add_option("-o,--output", combined_out, "Combined report path")->required();
  combine->add_option("--min-hits", min_hits, "Hit floor for a bin to compete");

  auto* oracle = app.add_subcommand("oracle", "Print closed-form reference curves");
  oracle->require_subcommand(1);
  Grid grid;
  std::size_t n = 15;
  std::vector<double> alphas;
  std::vector<double> betas;
  auto* gaussian = oracle->add_subcommand("gaussian", "Gaussian walk density and p2/p curves");
  gaussian->add_option("--n", n, "Number of steps")->check(CLI::PositiveNumber);
  gaussian->add_option("--a-min", grid.a_min);
  gaussian->add_option("--a-max", grid.a_max);
  gaussian->add_option("--step", grid.step)->check(CLI::PositiveNumber);
  gaussian->add_option("--alpha", alphas, "Increment-weight strengths");
  gaussian->add_option("--beta", betas, "Potential-weight strengths");

  double sigma = 0.5;
  Grid pmd_grid{0.0, 8.0, 0.1};
  std::size_t pmd_n = 15;
  auto* pmd = oracle->add_subcommand("pmd", "Maxwellian DGD density");
  pmd->add_option("--n", pmd_n, "Number of segments")->check(CLI::PositiveNumber);
  pmd->add_option("--sigma", sigma, "DGD per segment")->check(CLI::PositiveNumber);
  pmd->add_option("--a-min", pmd_grid.a_min);
  pmd->add_option("--a-max", pmd_grid.a_max);
  pmd->add_option("--step", pmd_grid.step)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*combine) return cmd_combine(inputs, combined_out, min_hits);
    if (*gaussian) {
      print_gaussian(n, grid, alphas, betas);
      return 0;
    }
    if (*pmd) {
      print_pmd(pmd_n, sigma, pmd_grid);
      return 0;
    }
  } catch (const rareips::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const rareips::EngineError& e) {
    std::cerr << "engine aborted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "rareips/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rareips::analytics {

namespace {

double as_real(std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  return static_cast<double>(n);
}

}  // namespace

double gaussian_pdf(std::size_t n, double a) {
  const double nd = as_real(n);
  return std::exp(-a * a / (2.0 * nd)) / std::sqrt(2.0 * std::numbers::pi * nd);
}

double gaussian_tail_exact(std::size_t n, double a) {
  const double nd = as_real(n);
  return 0.5 * std::erfc(a / std::sqrt(2.0 * nd));
}

double gaussian_p2_alpha(std::size_t n, double a, double alpha) {
  const double nd = as_real(n);
  const double shift = a - alpha * (nd - 1.0);
  const double expo =
      alpha * alpha * (nd - 1.0) / nd + shift * shift / (2.0 * nd);
  return gaussian_pdf(n, a) * std::pow(2.0 * std::numbers::pi * nd, 0.25) *
         std::exp(0.5 * expo);
}

double gaussian_p2_beta(std::size_t n, double a, double beta) {
  const double nd = as_real(n);
  const double shift = a - beta * nd * (nd - 1.0) / 2.0;
  const double expo = beta * beta * nd * (nd * nd - 1.0) / 12.0 +
                      shift * shift / (2.0 * nd);
  return gaussian_pdf(n, a) * std::pow(2.0 * std::numbers::pi * nd, 0.25) *
         std::exp(0.5 * expo);
}

double alpha_ratio_minimizer(std::size_t n, double alpha) {
  return alpha * (as_real(n) - 1.0);
}

double beta_ratio_minimizer(std::size_t n, double beta) {
  const double nd = as_real(n);
  return beta * nd * (nd - 1.0) / 2.0;
}

OptimalParams optimal_params(std::size_t n, double a0) {
  const double nd = as_real(n);
  return {a0 / std::sqrt(nd), 2.0 * a0 / std::pow(nd, 1.5)};
}

OptimalParams optimal_params_for_level(std::size_t n, double a) {
  return optimal_params(n, a / std::sqrt(as_real(n)));
}

double maxwellian_dgd_pdf(double sigma, std::size_t n, double d) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (d < 0.0) throw std::invalid_argument("DGD must be >= 0");
  const double s2 = sigma * sigma * as_real(n);
  return std::sqrt(2.0 / std::numbers::pi) * d * d / std::pow(s2, 1.5) *
         std::exp(-d * d / (2.0 * s2));
}

}  // namespace rareips::analytics

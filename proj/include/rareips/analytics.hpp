#pragma once

#include <cstddef>

// Closed-form reference curves for the Gaussian walk X_n = W_1 + ... + W_n
// and the Maxwellian DGD law. Used as oracles by the tests and printed by the
// `oracle` subcommand.
namespace rareips::analytics {

// Density of X_n at a.
double gaussian_pdf(std::size_t n, double a);

// P(X_n >= a), via the complementary error function.
double gaussian_tail_exact(std::size_t n, double a);

/// Asymptotic standard deviation p2(a) of the density estimator for the
/// increment weights exp(alpha (x_p - x_{p-1})):
///   p2^2 = p^2 sqrt(2 pi n) exp(alpha^2 (n-1)/n + (a - alpha (n-1))^2 / (2n)).
/// At alpha = 0 this is sqrt(p(a)), plain Monte Carlo.
double gaussian_p2_alpha(std::size_t n, double a, double alpha);

/// Same for the potential weights exp(beta x_p):
///   p2^2 = p^2 sqrt(2 pi n) exp(beta^2 n (n^2-1)/12
///                               + (a - beta n (n-1)/2)^2 / (2n)).
double gaussian_p2_beta(std::size_t n, double a, double beta);

// Levels where p2/p is smallest.
double alpha_ratio_minimizer(std::size_t n, double alpha);
double beta_ratio_minimizer(std::size_t n, double beta);

struct OptimalParams {
  double alpha = 0.0;
  double beta = 0.0;
};

// For a target level a = a0 sqrt(n): alpha* = a0 / sqrt(n),
// beta* = 2 a0 / n^{3/2}.
OptimalParams optimal_params(std::size_t n, double a0);
OptimalParams optimal_params_for_level(std::size_t n, double a);

// Density of |r| when |r|^2 follows the Maxwellian law with variance scale
// sigma^2 n: sqrt(2/pi) d^2 / (sigma^2 n)^{3/2} exp(-d^2 / (2 sigma^2 n)).
double maxwellian_dgd_pdf(double sigma, std::size_t n, double d);

}  // namespace rareips::analytics

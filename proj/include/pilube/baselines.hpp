#pragma once

#include <span>
#include <vector>

#include "pilube/network.hpp"

namespace pilube {

/// Gaussian multiplier lambda(alpha): the tabulated 1.15 / 1.64 / 1.96 for
/// alpha = 0.25 / 0.10 / 0.05, otherwise the normal quantile at 1 - alpha/2.
double gaussian_multiplier(double alpha);

/// [mu - lambda sigma, mu + lambda sigma] with lambda = gaussian_multiplier(alpha).
Interval traditional_pi(double mu, double sigma, double alpha);
/// Same with an explicit multiplier.
Interval traditional_pi_with_multiplier(double mu, double sigma, double multiplier);

/// Quantile by linear interpolation of order statistics at position p (n - 1).
double empirical_quantile(std::vector<double> samples, double p);

/// [q(alpha/2), q(1 - alpha/2)]. alpha may be 1 (both bounds at the median).
Interval empirical_quantile_pi(std::span<const double> samples, double alpha);

/// For each index t >= window, traditional_pi from the sample mean and
/// sample standard deviation of values[t - window, t). Returns
/// values.size() - window intervals.
std::vector<Interval> rolling_gaussian_pi(std::span<const double> values, std::size_t window, double alpha);

}  // namespace pilube

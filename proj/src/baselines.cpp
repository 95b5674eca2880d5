#include "pilube/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace pilube {

double gaussian_multiplier(double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("gaussian_multiplier: alpha must be in (0,1)");
    if (alpha == 0.25) return 1.15;
    if (alpha == 0.10) return 1.64;
    if (alpha == 0.05) return 1.96;
    return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

Interval traditional_pi_with_multiplier(double mu, double sigma, double multiplier) {
    if (!(sigma >= 0)) throw std::invalid_argument("traditional_pi: sigma must be >= 0");
    if (!(multiplier > 0)) throw std::invalid_argument("traditional_pi: multiplier must be positive");
    return {mu - multiplier * sigma, mu + multiplier * sigma};
}

Interval traditional_pi(double mu, double sigma, double alpha) {
    return traditional_pi_with_multiplier(mu, sigma, gaussian_multiplier(alpha));
}

double empirical_quantile(std::vector<double> samples, double p) {
    if (samples.empty()) throw std::invalid_argument("empirical_quantile: no samples");
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("empirical_quantile: p must be in [0,1]");
    std::sort(samples.begin(), samples.end());
    const double pos = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
}

Interval empirical_quantile_pi(std::span<const double> samples, double alpha) {
    if (samples.empty()) throw std::invalid_argument("empirical_quantile_pi: no samples");
    if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("empirical_quantile_pi: alpha must be in (0,1]");
    std::vector<double> s(samples.begin(), samples.end());
    return {empirical_quantile(s, alpha / 2.0), empirical_quantile(s, 1.0 - alpha / 2.0)};
}

std::vector<Interval> rolling_gaussian_pi(std::span<const double> values, std::size_t window, double alpha) {
    if (window < 2) throw std::invalid_argument("rolling_gaussian_pi: window must be >= 2");
    if (values.size() <= window) throw std::invalid_argument("rolling_gaussian_pi: series not longer than window");
    const double lambda = gaussian_multiplier(alpha);
    std::vector<Interval> out;
    out.reserve(values.size() - window);
    const double n = static_cast<double>(window);
    for (std::size_t t = window; t < values.size(); ++t) {
        double mean = 0.0;
        for (std::size_t i = t - window; i < t; ++i) mean += values[i];
        mean /= n;
        double ss = 0.0;
        for (std::size_t i = t - window; i < t; ++i) ss += (values[i] - mean) * (values[i] - mean);
        out.push_back(traditional_pi_with_multiplier(mean, std::sqrt(ss / (n - 1.0)), lambda));
    }
    return out;
}

}  // namespace pilube

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pilube/network.hpp"

namespace pilube {

/// Added to the PINAFD denominator so that full coverage gives 0, not 0/0.
inline constexpr double kPinafdEpsilon = 1e-10;

// Crossed bounds (upper < lower) are handled uniformly by every metric: the
// interval covers nothing and its width is clamped to zero. A target between
// crossed bounds is a miss below the lower and above the upper bound at once.

std::vector<int> coverage_flags(std::span<const double> targets, std::span<const Interval> intervals);

double picp(std::span<const double> targets, std::span<const Interval> intervals);

double pinaw(std::span<const Interval> intervals, double range_R);

/// Mean distance of uncovered targets to their nearest bound, over R.
double pinafd(std::span<const double> targets, std::span<const Interval> intervals, double range_R,
              double eps = kPinafdEpsilon);

inline double ace(double picp_value, double pinc) { return picp_value - pinc; }

/// Mean interval score S_AV (negatively oriented: 0 is best).
double interval_score(std::span<const double> targets, std::span<const Interval> intervals, double alpha);

/// Euclidean norm of the target deviations from the interval midpoints.
double mid_deviation(std::span<const double> targets, std::span<const Interval> intervals);

/// sigma_p times the summed miss distances below the lower and above the upper bound.
double pun(std::span<const double> targets, std::span<const Interval> intervals, double sigma_p);

/// Default pun scaling 1 / (n R), commensurate with PINAW.
inline double default_sigma_p(std::size_t n, double range_R) { return 1.0 / (static_cast<double>(n) * range_R); }

struct PiMetrics {
    double picp = 0.0;
    double pinaw = 0.0;
    double pinafd = 0.0;
    double ace = 0.0;
    double s_av = 0.0;
    double mid_dev = 0.0;
    double pun = 0.0;
    std::size_t n_misses = 0;

    std::string to_json() const;
    static PiMetrics from_json(const std::string& text);
};

/// Every metric in one pass. `sigma_p` defaults to 1 / (n R).
PiMetrics compute_metrics(std::span<const double> targets, std::span<const Interval> intervals, double range_R,
                          double alpha, std::optional<double> sigma_p = std::nullopt);

}  // namespace pilube

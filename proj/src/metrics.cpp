#include "pilube/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace pilube {

namespace {

void check_pair(std::span<const double> targets, std::span<const Interval> intervals) {
    if (targets.size() != intervals.size())
        throw std::invalid_argument("metrics: " + std::to_string(targets.size()) + " targets vs " +
                                    std::to_string(intervals.size()) + " intervals");
    if (targets.empty()) throw std::invalid_argument("metrics: empty input");
}

void check_range(double range_R) {
    if (!(range_R > 0)) throw std::invalid_argument("metrics: range R must be positive");
}

// A crossed interval (upper < lower) covers nothing.
inline bool covered(double t, const Interval& iv) { return iv.lower <= t && t <= iv.upper; }

inline double width(const Interval& iv) { return std::max(iv.upper - iv.lower, 0.0); }

// Miss distances; both are positive for a target strictly inside crossed bounds.
inline double below(double t, const Interval& iv) { return std::max(iv.lower - t, 0.0); }
inline double above(double t, const Interval& iv) { return std::max(t - iv.upper, 0.0); }

// Distance from an uncovered target to the nearer bound.
inline double failure_distance(double t, const Interval& iv) {
    return std::min(std::abs(t - iv.upper), std::abs(iv.lower - t));
}

}  // namespace

std::vector<int> coverage_flags(std::span<const double> targets, std::span<const Interval> intervals) {
    check_pair(targets, intervals);
    std::vector<int> flags(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j) flags[j] = covered(targets[j], intervals[j]) ? 1 : 0;
    return flags;
}

double picp(std::span<const double> targets, std::span<const Interval> intervals) {
    check_pair(targets, intervals);
    std::size_t hits = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) hits += covered(targets[j], intervals[j]);
    return static_cast<double>(hits) / static_cast<double>(targets.size());
}

double pinaw(std::span<const Interval> intervals, double range_R) {
    check_range(range_R);
    if (intervals.empty()) throw std::invalid_argument("metrics: empty input");
    double sum = 0.0;
    for (const auto& iv : intervals) sum += width(iv);
    return sum / (static_cast<double>(intervals.size()) * range_R);
}

double pinafd(std::span<const double> targets, std::span<const Interval> intervals, double range_R, double eps) {
    check_pair(targets, intervals);
    check_range(range_R);
    double dist = 0.0;
    std::size_t misses = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        if (covered(targets[j], intervals[j])) continue;
        dist += failure_distance(targets[j], intervals[j]);
        ++misses;
    }
    return dist / (range_R * static_cast<double>(misses) + eps);
}

double interval_score(std::span<const double> targets, std::span<const Interval> intervals, double alpha) {
    check_pair(targets, intervals);
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("interval_score: alpha must be in (0,1)");
    double sum = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const auto& iv = intervals[j];
        sum += -2.0 * alpha * width(iv) - 4.0 * (below(targets[j], iv) + above(targets[j], iv));
    }
    return sum / static_cast<double>(targets.size());
}

double mid_deviation(std::span<const double> targets, std::span<const Interval> intervals) {
    check_pair(targets, intervals);
    double sq = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const double d = targets[j] - 0.5 * (intervals[j].upper + intervals[j].lower);
        sq += d * d;
    }
    return std::sqrt(sq);
}

double pun(std::span<const double> targets, std::span<const Interval> intervals, double sigma_p) {
    check_pair(targets, intervals);
    if (!(sigma_p > 0)) throw std::invalid_argument("pun: sigma_p must be positive");
    double under = 0.0, over = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        under += below(targets[j], intervals[j]);
        over += above(targets[j], intervals[j]);
    }
    return sigma_p * under + sigma_p * over;
}

PiMetrics compute_metrics(std::span<const double> targets, std::span<const Interval> intervals, double range_R,
                          double alpha, std::optional<double> sigma_p) {
    check_pair(targets, intervals);
    check_range(range_R);
    const double n = static_cast<double>(targets.size());
    PiMetrics m;
    std::size_t hits = 0;
    double width_sum = 0.0, fail_sum = 0.0, score_sum = 0.0, dev_sq = 0.0, under = 0.0, over = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const auto& iv = intervals[j];
        const double t = targets[j];
        width_sum += width(iv);
        if (covered(t, iv)) {
            ++hits;
        } else {
            fail_sum += failure_distance(t, iv);
        }
        const double lo_miss = below(t, iv);
        const double hi_miss = above(t, iv);
        under += lo_miss;
        over += hi_miss;
        score_sum += -2.0 * alpha * width(iv) - 4.0 * (lo_miss + hi_miss);
        const double dev = t - 0.5 * (iv.upper + iv.lower);
        dev_sq += dev * dev;
    }
    const double sp = sigma_p.value_or(default_sigma_p(targets.size(), range_R));
    m.n_misses = targets.size() - hits;
    m.picp = static_cast<double>(hits) / n;
    m.pinaw = width_sum / (n * range_R);
    m.pinafd = fail_sum / (range_R * static_cast<double>(m.n_misses) + kPinafdEpsilon);
    m.ace = m.picp - (1.0 - alpha);
    m.s_av = score_sum / n;
    m.mid_dev = std::sqrt(dev_sq);
    m.pun = sp * under + sp * over;
    return m;
}

std::string PiMetrics::to_json() const {
    nlohmann::json j;
    j["picp"] = picp;
    j["pinaw"] = pinaw;
    j["pinafd"] = pinafd;
    j["ace"] = ace;
    j["s_av"] = s_av;
    j["mid_dev"] = mid_dev;
    j["pun"] = pun;
    j["n_misses"] = n_misses;
    return j.dump();
}

PiMetrics PiMetrics::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    PiMetrics m;
    m.picp = j.at("picp").get<double>();
    m.pinaw = j.at("pinaw").get<double>();
    m.pinafd = j.at("pinafd").get<double>();
    m.ace = j.at("ace").get<double>();
    m.s_av = j.at("s_av").get<double>();
    m.mid_dev = j.at("mid_dev").get<double>();
    m.pun = j.at("pun").get<double>();
    m.n_misses = j.at("n_misses").get<std::size_t>();
    return m;
}

}  // namespace pilube

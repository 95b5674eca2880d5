#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "pilube/costs.hpp"

using namespace pilube;

namespace {

CostSpec spec_of(CostKind kind, double alpha = 0.10) {
    CostSpec s;
    s.kind = kind;
    s.alpha = alpha;
    return s;
}

// n = 20, R = 10, every width 2 (PINAW 0.2), `misses` targets outside.
struct Frozen {
    std::vector<double> targets;
    std::vector<Interval> intervals;
    double R = 10.0;
};

Frozen frozen(std::size_t n, std::size_t misses, double width = 2.0) {
    Frozen f;
    for (std::size_t j = 0; j < n; ++j) {
        f.intervals.push_back({0.0, width});
        f.targets.push_back(j < misses ? width + 3.0 : width / 2);
    }
    return f;
}

const CostKind kAllKinds[] = {CostKind::CwcMult, CostKind::CwcAdd, CostKind::CwcCont, CostKind::Wan,
                              CostKind::Marin,   CostKind::ZhangDic, CostKind::Cwfdc};

}  // namespace

TEST_CASE("cwc_multiplicative") {
    CHECK(formula::cwc_multiplicative(0.2, 0.95, 0.9, 50) == 0.2);
    CHECK(formula::cwc_multiplicative(0.2, 0.85, 0.9, 50) == doctest::Approx(2.636495).epsilon(1e-5));
    CHECK(formula::cwc_multiplicative(0.0, 0.0, 0.9, 50) == 0.0);

    const auto f = frozen(20, 3);
    CHECK(cwc_multiplicative(f.targets, f.intervals, f.R, spec_of(CostKind::CwcMult)) ==
          doctest::Approx(0.2 * (1 + std::exp(2.5))).epsilon(1e-12));
}

TEST_CASE("cwc_additive") {
    CHECK(formula::cwc_additive(0.2, 0.95, 0.9, 50) == 0.2);
    CHECK(formula::cwc_additive(0.2, 0.85, 0.9, 50) == doctest::Approx(12.38249).epsilon(1e-6));
    CHECK(formula::cwc_additive(0.0, 0.0, 0.9, 50) == doctest::Approx(std::exp(45.0)).epsilon(1e-12));
}

TEST_CASE("cwc_continuous") {
    CHECK(formula::cwc_continuous(0.2, 0.9, 0.9, 50) == 0.2);
    CHECK(formula::cwc_continuous(0.2, 0.85, 0.9, 50) == doctest::Approx(11.38249).epsilon(1e-6));
    CHECK(formula::cwc_continuous(0.2, 0.97, 0.9, 50) == 0.2);
}

TEST_CASE("wan") {
    CHECK(formula::wan(-0.8, 0.02, 1, 1) == doctest::Approx(0.82));
    CHECK(formula::wan(0.0, 0.0, 1, 1) == 0.0);
    CHECK(formula::wan(0.0, -0.05, 1, 1) == doctest::Approx(0.05));
}

TEST_CASE("marin") {
    const std::vector<double> t{2};
    const std::vector<Interval> iv{{1, 3}};
    CHECK(marin_cost(t, iv, 10.0, spec_of(CostKind::Marin)) == doctest::Approx(0.206738).epsilon(1e-6));
    CHECK(formula::marin(0.3, 2.0, 0.9, 0.1, 1, 0.5, 50) == doctest::Approx(0.3 + 2.0 + 1.0));
    CHECK(formula::marin(0.3, 1.0, 0.95, 0.1, 1, 1, 100) < formula::marin(0.3, 1.0, 0.95, 0.1, 1, 1, 50));
}

TEST_CASE("zhang_dic") {
    CHECK(formula::zhang_dic(0.15, 5.0, 0.95, 0.9) == 0.15);
    const std::vector<Interval> iv{{1, 2}, {4, 6}};
    CHECK(zhang_dic(std::vector<double>{0, 5}, iv, 10.0, spec_of(CostKind::ZhangDic)) ==
          doctest::Approx(0.20).epsilon(1e-12));
    auto spec = spec_of(CostKind::ZhangDic);
    spec.sigma_p = 1.0;
    CHECK(zhang_dic(std::vector<double>{0, 5}, std::vector<Interval>{{1, 2}, {1, 3}}, 5.0, spec) ==
          doctest::Approx(3.3).epsilon(1e-12));
}

TEST_CASE("cwfdc") {
    CHECK(formula::cwfdc(0.10, 0.02, 0.902, 0.10, 1, 1000, 0.002) == doctest::Approx(0.12).epsilon(1e-9));
    CHECK(formula::cwfdc(0.10, 0.02, 0.90, 0.10, 1, 1000, 0.002) == doctest::Approx(0.124).epsilon(1e-12));
    CHECK(formula::cwfdc(0.10, 0.02, 0.95, 0.10, 1, 1000, 0.002) == doctest::Approx(2.4240).epsilon(1e-12));

    const auto f = frozen(20, 3);
    const auto m = compute_metrics(f.targets, f.intervals, f.R, 0.1);
    CHECK(cwfdc(f.targets, f.intervals, f.R, spec_of(CostKind::Cwfdc)) ==
          doctest::Approx(m.pinaw + m.pinafd + 1000 * std::pow(0.902 - 0.85, 2)).epsilon(1e-12));
}

TEST_CASE("evaluate dispatches to the direct functions") {
    const auto f = frozen(20, 3);
    const auto e = [&](CostKind k) { return evaluate(spec_of(k), f.targets, f.intervals, f.R); };
    CHECK(e(CostKind::Cwfdc) == cwfdc(f.targets, f.intervals, f.R, spec_of(CostKind::Cwfdc)));
    CHECK(e(CostKind::CwcMult) == cwc_multiplicative(f.targets, f.intervals, f.R, spec_of(CostKind::CwcMult)));
    CHECK(e(CostKind::CwcAdd) == cwc_additive(f.targets, f.intervals, f.R, spec_of(CostKind::CwcAdd)));
    CHECK(e(CostKind::CwcCont) == cwc_continuous(f.targets, f.intervals, f.R, spec_of(CostKind::CwcCont)));
    CHECK(e(CostKind::Wan) == wan_cost(f.targets, f.intervals, f.R, spec_of(CostKind::Wan)));
    CHECK(e(CostKind::Marin) == marin_cost(f.targets, f.intervals, f.R, spec_of(CostKind::Marin)));
    CHECK(e(CostKind::ZhangDic) == zhang_dic(f.targets, f.intervals, f.R, spec_of(CostKind::ZhangDic)));
    CHECK_THROWS_AS(parse_cost_kind("cwc-mul"), std::invalid_argument);
    CHECK_THROWS_AS(cwfdc(f.targets, f.intervals, f.R, spec_of(CostKind::Wan)), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(spec_of(CostKind::Cwfdc), f.targets, f.intervals, 0.0), std::invalid_argument);
}

TEST_CASE("metric-based evaluation matches sample-based evaluation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> t;
        std::vector<Interval> iv;
        for (int j = 0; j < 40; ++j) {
            t.push_back(u(rng));
            const double lo = u(rng);
            iv.push_back({lo, lo + std::abs(u(rng))});
        }
        for (auto k : kAllKinds) {
            const auto spec = spec_of(k);
            const auto m = compute_metrics(t, iv, 6.0, spec.alpha);
            const double direct = evaluate(spec, t, iv, 6.0);
            CHECK(evaluate(spec, m, t.size()) == doctest::Approx(direct).epsilon(1e-12));
            CHECK(direct >= 0.0);
        }
    }
}

TEST_CASE("discontinuity witnesses at the PINC crossing") {
    const double pinaw = 0.2, pinc = 0.9, eta = 50, step = 1.0 / 1000;
    const double above = pinc, below = pinc - step;
    CHECK(formula::cwc_multiplicative(pinaw, below, pinc, eta) - formula::cwc_multiplicative(pinaw, above, pinc, eta) >=
          pinaw);
    CHECK(formula::cwc_additive(pinaw, below, pinc, eta) - formula::cwc_additive(pinaw, above, pinc, eta) >= 1.0);
    // the continuous variants change by at most the analytic one-sample increment
    CHECK(formula::cwc_continuous(pinaw, below, pinc, eta) - formula::cwc_continuous(pinaw, above, pinc, eta) ==
          doctest::Approx(std::expm1(eta * step)).epsilon(1e-12));
    const double target = 0.902;
    CHECK(std::abs(formula::cwfdc(pinaw, 0.01, target - step, 0.1, 1, 1000, 0.002) -
                   formula::cwfdc(pinaw, 0.01, target, 0.1, 1, 1000, 0.002)) <= 1000 * step * step + 1e-12);
}

TEST_CASE("cwfdc penalty is an exact quadratic in PICP") {
    const double target = 0.902;
    auto pen = [&](double p) { return formula::cwfdc(0.0, 0.0, p, 0.1, 1, 1000, 0.002); };
    const double p0 = 0.85, p1 = 0.90, p2 = 0.95;
    // divided differences: the second one is the leading coefficient
    const double d01 = (pen(p1) - pen(p0)) / (p1 - p0);
    const double d12 = (pen(p2) - pen(p1)) / (p2 - p1);
    const double a = (d12 - d01) / (p2 - p0);
    CHECK(a == doctest::Approx(1000.0).epsilon(1e-9));
    const double b = d01 - a * (p0 + p1);
    CHECK(-b / (2 * a) == doctest::Approx(target).epsilon(1e-9));
}

TEST_CASE("cwfdc argmin is the coverage closest to 1 - alpha + delta") {
    double best = 1e300, arg = -1;
    for (int k = 0; k <= 1000; ++k) {
        const double p = k / 1000.0;
        const double c = formula::cwfdc(0.2, 0.03, p, 0.1, 1, 1000, 0.002);
        if (c < best) best = c, arg = p;
    }
    CHECK(arg == doctest::Approx(0.902));
}

TEST_CASE("overcoverage is free for CWC and penalized by cwfdc") {
    double prev = formula::cwfdc(0.2, 0.0, 0.902, 0.1, 1, 1000, 0.002);
    for (double p = 0.91; p <= 1.0; p += 0.01) {
        CHECK(formula::cwc_multiplicative(0.2, p, 0.9, 50) == 0.2);
        CHECK(formula::cwc_additive(0.2, p, 0.9, 50) == 0.2);
        CHECK(formula::cwc_continuous(0.2, p, 0.9, 50) == 0.2);
        const double c = formula::cwfdc(0.2, 0.0, p, 0.1, 1, 1000, 0.002);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("zero-width pathology") {
    std::vector<double> t(100, 1.0);
    std::vector<Interval> iv(100, Interval{5.0, 5.0});
    CHECK(cwc_multiplicative(t, iv, 10.0, spec_of(CostKind::CwcMult)) == 0.0);
    CHECK(cwc_additive(t, iv, 10.0, spec_of(CostKind::CwcAdd)) >= std::exp(50 * 0.9 * 0.5));
}

TEST_CASE("CostSpec validation and JSON") {
    auto s = spec_of(CostKind::Cwfdc);
    CHECK(s.delta_or_default() == doctest::Approx(0.002));
    CHECK(s.coverage_target() == doctest::Approx(0.902));
    s.beta = 150;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.kind = CostKind::CwcMult;
    CHECK_NOTHROW(s.validate());
    s.alpha = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    CostSpec full;
    full.kind = CostKind::Marin;
    full.alpha = 0.05;
    full.beta2 = 0.25;
    full.sigma_p = 0.125;
    full.delta = 0.001;
    const auto back = CostSpec::from_json(full.to_json());
    CHECK(back.kind == full.kind);
    CHECK(back.alpha == full.alpha);
    CHECK(back.beta2 == full.beta2);
    CHECK(back.sigma_p == full.sigma_p);
    CHECK(back.delta == full.delta);
    CHECK_FALSE(CostSpec::from_json(R"({"kind":"wan"})").beta2.has_value());
    CHECK_THROWS_AS(CostSpec::from_json(R"({"kind":"wan","lambda":1})"), std::invalid_argument);
    CHECK_THROWS_AS(CostSpec::from_json(R"({"alpha":0.1})"), std::invalid_argument);
    CHECK_THROWS_AS(CostSpec::from_json(R"({"kind":"cwc"})"), std::invalid_argument);
    for (auto k : kAllKinds) CHECK(parse_cost_kind(to_string(k)) == k);
}

TEST_CASE("selection values") {
    PiMetrics m;
    m.pinaw = 0.2;
    m.pinafd = 0.05;
    m.mid_dev = 3.0;
    m.picp = 0.95;
    CHECK(selection_value(spec_of(CostKind::Cwfdc), m, 10) == doctest::Approx(0.25));
    CHECK(selection_value(spec_of(CostKind::Marin), m, 10) == doctest::Approx(0.2 + 0.9));
    CHECK(selection_value(spec_of(CostKind::CwcMult), m, 10) == evaluate(spec_of(CostKind::CwcMult), m, 10));
}

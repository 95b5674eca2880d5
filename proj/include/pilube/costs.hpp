#pragma once

#include <optional>
#include <span>
#include <string>

#include "pilube/metrics.hpp"
#include "pilube/network.hpp"

namespace pilube {

enum class CostKind { CwcMult, CwcAdd, CwcCont, Wan, Marin, ZhangDic, Cwfdc };

CostKind parse_cost_kind(const std::string& name);
std::string to_string(CostKind kind);

/// Training objective and its hyperparameters. Optional fields resolve to
/// data-dependent defaults: beta2 = 1/n, sigma_p = 1/(n R), delta = alpha/50.
struct CostSpec {
    CostKind kind = CostKind::Cwfdc;
    double alpha = 0.10;
    double eta = 50.0;
    double lambda_w = 1.0;
    double gamma_w = 1.0;
    double beta1 = 1.0;
    std::optional<double> beta2;
    double eta_marin = 50.0;
    std::optional<double> sigma_p;
    double rho = 1.0;
    double beta = 1000.0;
    std::optional<double> delta;

    double pinc() const { return 1.0 - alpha; }
    double delta_or_default() const { return delta.value_or(alpha / 50.0); }
    /// Coverage the CWFDC penalty is centered on: 1 - alpha + delta.
    double coverage_target() const { return 1.0 - alpha + delta_or_default(); }

    void validate() const;

    /// Flat JSON object using the field names above; unset optionals are omitted.
    std::string to_json() const;
    /// Unknown keys are rejected.
    static CostSpec from_json(const std::string& text);
};

// Cost formulas from precomputed quantities. These are the single source of
// truth; the sample-level functions below evaluate the metrics and delegate.
namespace formula {

/// gamma * exp(eta (PINC - PICP)), gamma = [PICP < PINC]
double lube_penalty(double picp, double pinc, double eta);
double cwc_multiplicative(double pinaw, double picp, double pinc, double eta);
double cwc_additive(double pinaw, double picp, double pinc, double eta);
double cwc_continuous(double pinaw, double picp, double pinc, double eta);
double wan(double s_av, double ace, double lambda_w, double gamma_w);
double marin(double pinaw, double mid_dev, double picp, double alpha, double beta1, double beta2, double eta_marin);
double zhang_dic(double pinaw, double pun, double picp, double pinc);
double cwfdc(double pinaw, double pinafd, double picp, double alpha, double rho, double beta, double delta);

}  // namespace formula

using Targets = std::span<const double>;
using Intervals = std::span<const Interval>;

double cwc_multiplicative(Targets t, Intervals iv, double range_R, const CostSpec& spec);
double cwc_additive(Targets t, Intervals iv, double range_R, const CostSpec& spec);
double cwc_continuous(Targets t, Intervals iv, double range_R, const CostSpec& spec);
double wan_cost(Targets t, Intervals iv, double range_R, const CostSpec& spec);
double marin_cost(Targets t, Intervals iv, double range_R, const CostSpec& spec);
double zhang_dic(Targets t, Intervals iv, double range_R, const CostSpec& spec);
double cwfdc(Targets t, Intervals iv, double range_R, const CostSpec& spec);

/// Dispatches on spec.kind.
double evaluate(const CostSpec& spec, Targets t, Intervals iv, double range_R);

/// Same as evaluate() but from metrics already computed over n samples.
double evaluate(const CostSpec& spec, const PiMetrics& m, std::size_t n);

/// Model-selection value used when comparing network sizes: the cost itself
/// for the LUBE family, Wan and Zhang; PINAW + ||e||^2/n for Marin; PINAW +
/// PINAFD for CWFDC.
double selection_value(const CostSpec& spec, const PiMetrics& m, std::size_t n);

}  // namespace pilube

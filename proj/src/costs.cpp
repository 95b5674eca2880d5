#include "pilube/costs.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace pilube {

CostKind parse_cost_kind(const std::string& name) {
    if (name == "cwc-mult") return CostKind::CwcMult;
    if (name == "cwc-add") return CostKind::CwcAdd;
    if (name == "cwc-cont") return CostKind::CwcCont;
    if (name == "wan") return CostKind::Wan;
    if (name == "marin") return CostKind::Marin;
    if (name == "zhang-dic") return CostKind::ZhangDic;
    if (name == "cwfdc") return CostKind::Cwfdc;
    throw std::invalid_argument("unknown cost kind '" + name + "'");
}

std::string to_string(CostKind kind) {
    switch (kind) {
        case CostKind::CwcMult: return "cwc-mult";
        case CostKind::CwcAdd: return "cwc-add";
        case CostKind::CwcCont: return "cwc-cont";
        case CostKind::Wan: return "wan";
        case CostKind::Marin: return "marin";
        case CostKind::ZhangDic: return "zhang-dic";
        case CostKind::Cwfdc: return "cwfdc";
    }
    throw std::invalid_argument("unknown cost kind");
}

void CostSpec::validate() const {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("CostSpec: alpha must be in (0,1)");
    if (delta && !(*delta >= 0)) throw std::invalid_argument("CostSpec: delta must be >= 0");
    if (!(rho >= 0)) throw std::invalid_argument("CostSpec: rho must be >= 0");
    if (sigma_p && !(*sigma_p > 0)) throw std::invalid_argument("CostSpec: sigma_p must be > 0");
    if (beta2 && !(*beta2 >= 0)) throw std::invalid_argument("CostSpec: beta2 must be >= 0");
    if (kind == CostKind::Cwfdc && !(beta > 200))
        throw std::invalid_argument("CostSpec: cwfdc needs beta > 200");
    for (double v : {eta, lambda_w, gamma_w, beta1, eta_marin, beta}) {
        if (!std::isfinite(v)) throw std::invalid_argument("CostSpec: non-finite hyperparameter");
    }
}

std::string CostSpec::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = to_string(kind);
    j["alpha"] = alpha;
    j["eta"] = eta;
    j["lambda_w"] = lambda_w;
    j["gamma_w"] = gamma_w;
    j["beta1"] = beta1;
    if (beta2) j["beta2"] = *beta2;
    j["eta_marin"] = eta_marin;
    if (sigma_p) j["sigma_p"] = *sigma_p;
    j["rho"] = rho;
    j["beta"] = beta;
    if (delta) j["delta"] = *delta;
    return j.dump();
}

CostSpec CostSpec::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("CostSpec: expected a JSON object");
    CostSpec s;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") s.kind = parse_cost_kind(value.get<std::string>());
        else if (key == "alpha") s.alpha = value.get<double>();
        else if (key == "eta") s.eta = value.get<double>();
        else if (key == "lambda_w") s.lambda_w = value.get<double>();
        else if (key == "gamma_w") s.gamma_w = value.get<double>();
        else if (key == "beta1") s.beta1 = value.get<double>();
        else if (key == "beta2") s.beta2 = value.get<double>();
        else if (key == "eta_marin") s.eta_marin = value.get<double>();
        else if (key == "sigma_p") s.sigma_p = value.get<double>();
        else if (key == "rho") s.rho = value.get<double>();
        else if (key == "beta") s.beta = value.get<double>();
        else if (key == "delta") s.delta = value.get<double>();
        else throw std::invalid_argument("CostSpec: unknown key '" + key + "'");
    }
    if (!j.contains("kind")) throw std::invalid_argument("CostSpec: missing 'kind'");
    s.validate();
    return s;
}

namespace formula {

double lube_penalty(double picp, double pinc, double eta) {
    return picp < pinc ? std::exp(eta * (pinc - picp)) : 0.0;
}

double cwc_multiplicative(double pinaw, double picp, double pinc, double eta) {
    return pinaw * (1.0 + lube_penalty(picp, pinc, eta));
}

double cwc_additive(double pinaw, double picp, double pinc, double eta) {
    return pinaw + lube_penalty(picp, pinc, eta);
}

double cwc_continuous(double pinaw, double picp, double pinc, double eta) {
    return picp < pinc ? pinaw + std::expm1(eta * (pinc - picp)) : pinaw;
}

double wan(double s_av, double ace, double lambda_w, double gamma_w) {
    return lambda_w * std::abs(s_av) + gamma_w * std::abs(ace);
}

double marin(double pinaw, double mid_dev, double picp, double alpha, double beta1, double beta2, double eta_marin) {
    return beta1 * pinaw + beta2 * mid_dev * mid_dev + std::exp(-eta_marin * (picp - (1.0 - alpha)));
}

double zhang_dic(double pinaw, double pun, double picp, double pinc) { return picp < pinc ? pinaw + pun : pinaw; }

double cwfdc(double pinaw, double pinafd, double picp, double alpha, double rho, double beta, double delta) {
    const double gap = 1.0 - alpha + delta - picp;
    return pinaw + rho * pinafd + beta * gap * gap;
}

}  // namespace formula

namespace {

void require_kind(const CostSpec& spec, CostKind kind) {
    if (spec.kind != kind)
        throw std::invalid_argument("cost: spec kind " + to_string(spec.kind) + " passed to " + to_string(kind));
}

double require_range(double range_R) {
    if (!(range_R > 0)) throw std::invalid_argument("cost: range R must be positive");
    return range_R;
}

}  // namespace

double cwc_multiplicative(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::CwcMult);
    return formula::cwc_multiplicative(pinaw(iv, require_range(range_R)), picp(t, iv), spec.pinc(), spec.eta);
}

double cwc_additive(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::CwcAdd);
    return formula::cwc_additive(pinaw(iv, require_range(range_R)), picp(t, iv), spec.pinc(), spec.eta);
}

double cwc_continuous(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::CwcCont);
    return formula::cwc_continuous(pinaw(iv, require_range(range_R)), picp(t, iv), spec.pinc(), spec.eta);
}

double wan_cost(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::Wan);
    require_range(range_R);
    return formula::wan(interval_score(t, iv, spec.alpha), ace(picp(t, iv), spec.pinc()), spec.lambda_w,
                        spec.gamma_w);
}

double marin_cost(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::Marin);
    const double beta2 = spec.beta2.value_or(1.0 / static_cast<double>(t.size()));
    return formula::marin(pinaw(iv, require_range(range_R)), mid_deviation(t, iv), picp(t, iv), spec.alpha,
                          spec.beta1, beta2, spec.eta_marin);
}

double zhang_dic(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::ZhangDic);
    const double sp = spec.sigma_p.value_or(default_sigma_p(t.size(), require_range(range_R)));
    return formula::zhang_dic(pinaw(iv, range_R), pun(t, iv, sp), picp(t, iv), spec.pinc());
}

double cwfdc(Targets t, Intervals iv, double range_R, const CostSpec& spec) {
    require_kind(spec, CostKind::Cwfdc);
    return formula::cwfdc(pinaw(iv, require_range(range_R)), pinafd(t, iv, range_R), picp(t, iv), spec.alpha,
                          spec.rho, spec.beta, spec.delta_or_default());
}

double evaluate(const CostSpec& spec, Targets t, Intervals iv, double range_R) {
    switch (spec.kind) {
        case CostKind::CwcMult: return cwc_multiplicative(t, iv, range_R, spec);
        case CostKind::CwcAdd: return cwc_additive(t, iv, range_R, spec);
        case CostKind::CwcCont: return cwc_continuous(t, iv, range_R, spec);
        case CostKind::Wan: return wan_cost(t, iv, range_R, spec);
        case CostKind::Marin: return marin_cost(t, iv, range_R, spec);
        case CostKind::ZhangDic: return zhang_dic(t, iv, range_R, spec);
        case CostKind::Cwfdc: return cwfdc(t, iv, range_R, spec);
    }
    throw std::invalid_argument("evaluate: unknown cost kind");
}

double evaluate(const CostSpec& spec, const PiMetrics& m, std::size_t n) {
    switch (spec.kind) {
        case CostKind::CwcMult: return formula::cwc_multiplicative(m.pinaw, m.picp, spec.pinc(), spec.eta);
        case CostKind::CwcAdd: return formula::cwc_additive(m.pinaw, m.picp, spec.pinc(), spec.eta);
        case CostKind::CwcCont: return formula::cwc_continuous(m.pinaw, m.picp, spec.pinc(), spec.eta);
        case CostKind::Wan: return formula::wan(m.s_av, m.ace, spec.lambda_w, spec.gamma_w);
        case CostKind::Marin:
            return formula::marin(m.pinaw, m.mid_dev, m.picp, spec.alpha, spec.beta1,
                                  spec.beta2.value_or(1.0 / static_cast<double>(n)), spec.eta_marin);
        case CostKind::ZhangDic: return formula::zhang_dic(m.pinaw, m.pun, m.picp, spec.pinc());
        case CostKind::Cwfdc:
            return formula::cwfdc(m.pinaw, m.pinafd, m.picp, spec.alpha, spec.rho, spec.beta,
                                  spec.delta_or_default());
    }
    throw std::invalid_argument("evaluate: unknown cost kind");
}

double selection_value(const CostSpec& spec, const PiMetrics& m, std::size_t n) {
    switch (spec.kind) {
        case CostKind::Marin: return m.pinaw + m.mid_dev * m.mid_dev / static_cast<double>(n);
        case CostKind::Cwfdc: return m.pinaw + m.pinafd;
        default: return evaluate(spec, m, n);
    }
}

}  // namespace pilube

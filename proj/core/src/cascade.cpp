#include "polyharm/cascade.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace polyharm {

namespace {

int pow3(int k) {
    int r = 1;
    for (int i = 0; i < k; ++i) r *= 3;
    return r;
}

CascadeCheck make_check(std::string name, std::string expr, int k, double lhs, double rhs, bool ok) {
    return {std::move(name), std::move(expr), k, lhs, rhs, ok};
}

}  // namespace

int cascade_m(int d) { return pow3(d) + d + 2; }

int cascade_k1(int d) { return d * cascade_m(d) / 3 + 2; }

double cascade_s0(int d) {
    const double m = cascade_m(d);
    return (3.0 * d - 1.0) / 2.0 * m + d * pow3(d) / 4.0 + d + 6.0;
}

std::vector<CascadeCheck> cascade_checks(int d, double s) {
    const int m = cascade_m(d);
    const double alpha = 1.0 / m;
    auto ak = [&](int k) { return pow3(k) * alpha; };
    const double p = s - d;
    const int k1 = cascade_k1(d);
    const int p1 = static_cast<int>(std::floor(p / 3.0)) + 1;

    std::vector<CascadeCheck> out;
    out.push_back(make_check("I1", "alpha_1 + d alpha < 1 - alpha", 0, ak(1) + d * alpha, 1.0 - alpha,
                             ak(1) + d * alpha < 1.0 - alpha));
    out.push_back(make_check("I2", "d alpha < alpha_d / 2", 0, d * alpha, ak(d) / 2.0, d * alpha < ak(d) / 2.0));
    const double rhs3 = (p - m * (d - 1) / 2.0) / 3.0;
    out.push_back(make_check("I3", "k1 <= (p - m(d-1)/2) / 3", 0, k1, rhs3, k1 <= rhs3));
    out.push_back(make_check("I4", "p1 alpha_1 >= p alpha", 0, p1 * ak(1), p * alpha, p1 * ak(1) >= p * alpha));
    out.push_back(make_check("I5", "3 k1 alpha > d + 2 alpha", 0, 3.0 * k1 * alpha, d + 2.0 * alpha,
                             3.0 * k1 * alpha > d + 2.0 * alpha));
    for (int k = 1; k <= d; ++k) {
        const double lhs = ak(k) + (k - 1) * alpha;
        out.push_back(make_check("I6", "alpha_k + (k-1) alpha < 1", k, lhs, 1.0, lhs < 1.0));
    }
    for (int k = 1; k <= d; ++k) {
        const double rhs = 2.0 * (ak(k) + (k - 1) * alpha);
        out.push_back(make_check("I7", "alpha_{k+1} > 2 (alpha_k + (k-1) alpha)", k, ak(k + 1), rhs, ak(k + 1) > rhs));
    }
    return out;
}

double ParameterCascade::constant(const std::string& name) const {
    auto it = constants.find(name);
    return it == constants.end() ? 1.0 : it->second;
}

double ParameterCascade::effective_alpha() const {
    if (mode == CascadeMode::Scaled && overrides.alpha) return *overrides.alpha;
    return alpha;
}

double ParameterCascade::effective_alpha_k(int k) const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "level k must be at least 1");
    if (mode == CascadeMode::Scaled) {
        if (static_cast<std::size_t>(k) <= overrides.alpha_k.size()) return overrides.alpha_k[static_cast<std::size_t>(k - 1)];
        return std::pow(3.0, k) * effective_alpha();
    }
    return std::pow(3.0, k) * alpha;
}

double ParameterCascade::threshold(int k) const {
    if (mode == CascadeMode::Scaled && k >= 1 && static_cast<std::size_t>(k) <= overrides.thresholds.size())
        return overrides.thresholds[static_cast<std::size_t>(k - 1)];
    return constant("threshold") * std::pow(rho, effective_alpha_k(k));
}

double ParameterCascade::pool_radius() const {
    if (mode == CascadeMode::Scaled && overrides.pool_radius) return *overrides.pool_radius;
    return constant("pool") * p * std::pow(rho, effective_alpha());
}

double ParameterCascade::series_pool_radius() const {
    if (overrides.series_pool_radius) return *overrides.series_pool_radius;
    return std::numeric_limits<double>::infinity();
}

double ParameterCascade::block_radius(int k) const {
    if (mode == CascadeMode::Scaled && overrides.block_radius) return *overrides.block_radius;
    return 0.5 * std::pow(rho, 0.5 * effective_alpha_k(k + 1));
}

double ParameterCascade::shift_radius() const {
    if (mode == CascadeMode::Scaled && overrides.shift_radius) return *overrides.shift_radius;
    return p1 * std::pow(rho, effective_alpha());
}

double ParameterCascade::epsilon1() const {
    if (mode == CascadeMode::Scaled && overrides.epsilon1) return *overrides.epsilon1;
    return std::pow(rho, -d - 2.0 * effective_alpha());
}

int ParameterCascade::known_part_index() const {
    if (mode == CascadeMode::Scaled && overrides.known_part_order)
        return std::max(0, std::min(*overrides.known_part_order - 1, kSeriesOrderCap));
    return std::min(k1 - 1, kSeriesOrderCap);
}

bool ParameterCascade::all_checks_pass() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

ParameterCascade derive_parameters(int d, int l, double s, double rho, CascadeMode mode,
                                   const ScaledOverrides& overrides, const std::map<std::string, double>& constants) {
    if (d < 2) throw Error(ErrorCode::InvalidArgument, "dimension d must be at least 2");
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "degree l must be at least 1");
    if (!(rho > 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must exceed 1");
    if (!std::isfinite(s) || s < 0.0) throw Error(ErrorCode::InvalidArgument, "smoothness s must be finite and >= 0");

    ParameterCascade c;
    c.d = d;
    c.l = l;
    c.s = s;
    c.p = s - d;
    c.m = cascade_m(d);
    c.alpha = 1.0 / c.m;
    c.alpha_k.assign(static_cast<std::size_t>(d + 2), 0.0);
    for (int k = 1; k <= d + 1; ++k) c.alpha_k[static_cast<std::size_t>(k)] = pow3(k) * c.alpha;
    c.k1 = cascade_k1(d);
    c.p1 = static_cast<int>(std::floor(c.p / 3.0)) + 1;
    c.rho = rho;
    c.mode = mode;
    c.overrides = overrides;
    c.constants = constants;
    c.checks = cascade_checks(d, s);

    if (mode == CascadeMode::Scaled) {
        if (overrides.alpha && !(*overrides.alpha > 0.0))
            throw Error(ErrorCode::InvalidArgument, "scaled alpha must be positive");
        for (double t : overrides.thresholds)
            if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scaled thresholds must be non-negative");
        if (overrides.known_part_order && *overrides.known_part_order < 1)
            throw Error(ErrorCode::InvalidArgument, "known_part_order must be at least 1");
    }

    if (mode == CascadeMode::Theory && !c.all_checks_pass()) {
        std::ostringstream os;
        os << "s = " << s << " (s0 = " << cascade_s0(d) << "):";
        for (const auto& chk : c.checks) {
            if (chk.ok) continue;
            os << ' ' << chk.name << " [" << chk.expression;
            if (chk.k > 0) os << ", k=" << chk.k;
            os << ": " << chk.lhs << " vs " << chk.rhs << ']';
        }
        throw Error(ErrorCode::CascadeInequalityViolated, os.str());
    }
    return c;
}

const char* to_string(CascadeMode mode) { return mode == CascadeMode::Theory ? "theory" : "scaled"; }

}  // namespace polyharm

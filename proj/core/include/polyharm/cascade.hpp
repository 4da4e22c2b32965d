#pragma once

#include "polyharm/common.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyharm {

enum class CascadeMode { Theory, Scaled };

/// Scaled-mode substitutes. Unset entries fall back to the theory value computed
/// from the (possibly overridden) exponents.
struct ScaledOverrides {
    std::optional<double> alpha;
    /// alpha_k for k = 1, 2, ...; missing entries default to 3^k alpha.
    std::vector<double> alpha_k;
    /// Absolute resonance thresholds for k = 1, 2, ...; replace rho^{alpha_k}.
    std::vector<double> thresholds;
    /// Direction pool radius, replaces p rho^alpha.
    std::optional<double> pool_radius;
    /// Radius restricting the series sums; default is the whole potential support.
    std::optional<double> series_pool_radius;
    /// Radius of the inner set B_k, replaces rho^{alpha_{k+1}/2} / 2.
    std::optional<double> block_radius;
    /// Radius of the shift ball, replaces p1 rho^alpha.
    std::optional<double> shift_radius;
    std::optional<double> epsilon1;
    /// K in F = |v|^{2l} + F_{K-1}.
    std::optional<int> known_part_order;
};

struct CascadeCheck {
    std::string name;
    std::string expression;
    int k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

/// m = 3^d + d + 2
int cascade_m(int d);
/// floor(d / (3 alpha)) + 2 = floor(d m / 3) + 2, in integer arithmetic.
int cascade_k1(int d);
/// Smallest admissible smoothness (3d-1)/2 m + d 3^d / 4 + d + 6.
double cascade_s0(int d);

/// The seven exponent inequalities, the last three for k = 1..d.
std::vector<CascadeCheck> cascade_checks(int d, double s);

class ParameterCascade {
public:
    int d = 2;
    int l = 1;
    double s = 0.0;
    double p = 0.0;
    int m = 0;
    double alpha = 0.0;
    /// alpha_k[k] for k = 1..d+1; index 0 unused.
    std::vector<double> alpha_k;
    int k1 = 0;
    int p1 = 0;
    double rho = 0.0;
    CascadeMode mode = CascadeMode::Theory;
    ScaledOverrides overrides;
    /// Named constants ("pool", "threshold", "projection", "c1", "c2", "c"); default 1.
    std::map<std::string, double> constants;
    std::vector<CascadeCheck> checks;

    double constant(const std::string& name) const;

    /// Exponents actually used by the set definitions.
    double effective_alpha() const;
    double effective_alpha_k(int k) const;

    /// rho^{alpha_k}, or the scaled threshold for level k.
    double threshold(int k) const;
    /// p rho^alpha
    double pool_radius() const;
    /// Infinite unless overridden.
    double series_pool_radius() const;
    /// rho^{alpha_{k+1}/2} / 2 for level k.
    double block_radius(int k) const;
    /// p1 rho^alpha
    double shift_radius() const;
    /// rho^{-d-2 alpha}
    double epsilon1() const;
    /// Index s of F_s in the known part: min(k1 - 1, 6) in theory mode, K - 1 when scaled.
    int known_part_index() const;

    double shell_inner() const { return rho / 2.0; }
    double shell_outer() const { return 1.5 * rho; }
    bool all_checks_pass() const;
};

constexpr int kSeriesOrderCap = 6;

/// Throws InvalidArgument on bad inputs and, in theory mode,
/// CascadeInequalityViolated naming every failed inequality.
ParameterCascade derive_parameters(int d, int l, double s, double rho, CascadeMode mode = CascadeMode::Theory,
                                   const ScaledOverrides& overrides = {},
                                   const std::map<std::string, double>& constants = {});

const char* to_string(CascadeMode mode);

}  // namespace polyharm

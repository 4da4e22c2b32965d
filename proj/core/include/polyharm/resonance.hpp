#pragma once

#include "polyharm/cascade.hpp"
#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"

#include <vector>

namespace polyharm {

struct VMembership {
    bool member = false;
    bool in_shell = false;
    /// ||x|^{2l} - |x+b|^{2l}| - threshold
    double margin = 0.0;
};

/// x in V_b(threshold): ||x|^{2l} - |x+b|^{2l}| < threshold and rho/2 < |x| < 3rho/2.
VMembership in_V(const Vec& x, const Vec& b, int l, double threshold, double rho);

/// Rank over Q of integer vectors (exact, fraction-free elimination).
int integer_rank(const std::vector<IntCoords>& vectors);

struct ResonanceClass {
    /// 0 means non-resonant (x in U).
    int level = 0;
    std::vector<LatticeVector> directions;
    /// Margins of the witnesses at threshold(level).
    std::vector<double> margins;
    /// Smallest level-1 margin over the whole pool; positive for non-resonant points.
    double min_margin = 0.0;
    /// Level d was reached, outside the 1 <= k <= d-1 range of the theory.
    bool beyond_regime = false;

    bool resonant() const noexcept { return level > 0; }
};

/// Directions Gamma(p rho^alpha), excluding 0, in enumeration order.
std::vector<LatticeVector> direction_pool(const Lattice& lattice, const ParameterCascade& cascade);

/// Largest k such that x lies in E_1, ..., E_k, each E_j evaluated at threshold(j).
/// Witnesses are chosen greedily in pool order. Throws ShellViolation outside the shell.
ResonanceClass classify(const Vec& x, const Lattice& lattice, const ParameterCascade& cascade);
ResonanceClass classify(const Vec& x, const std::vector<LatticeVector>& pool, const ParameterCascade& cascade);

struct ProjectionBound {
    /// Coordinates of the projection of x onto span(directions) in a Gram-Schmidt basis.
    Vec components;
    /// c rho^{alpha_k + (k-1) alpha}
    double bound = 0.0;
    bool within = true;
};

ProjectionBound projection_bound(const Vec& x, const std::vector<LatticeVector>& directions,
                                 const ParameterCascade& cascade);

}  // namespace polyharm

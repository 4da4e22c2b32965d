#pragma once

#include "polyharm/cascade.hpp"
#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"
#include "polyharm/planewave.hpp"
#include "polyharm/potential.hpp"

#include <vector>

namespace polyharm {

struct ResonantIndexSet {
    /// v = gamma + t
    Vec v;
    Vec t;
    IntCoords center;
    std::vector<LatticeVector> directions;
    /// Inner set B_k as offsets b = sum n_i gamma_i with |b| < block radius.
    std::vector<IntCoords> inner;
    /// Offsets b + a of the full set, sorted by |b + a|^2 then lexicographically.
    std::vector<IntCoords> offsets;
    /// Shift-ball size |{a : |a| < shift radius}| including 0.
    std::size_t shift_count = 0;
    double block_radius = 0.0;
    double shift_radius = 0.0;

    std::size_t size() const noexcept { return offsets.size(); }
    /// h_i = center + offsets_i
    std::vector<IntCoords> indices() const;
};

/// {v + b + a : b in B_k, a in Gamma, |a| < shift_radius} with B_k from the
/// cascade's block radius for level k = directions.size().
ResonantIndexSet build_index_set(const Lattice& lattice, const Vec& v, const Vec& t,
                                 const std::vector<LatticeVector>& directions, const ParameterCascade& cascade);
/// Explicit radii.
ResonantIndexSet build_index_set(const Lattice& lattice, const Vec& v, const Vec& t,
                                 const std::vector<LatticeVector>& directions, double block_radius,
                                 double shift_radius);

struct ResonantBlock {
    /// Matrix shifted by -|v|^{2l}.
    CMat matrix;
    double shift = 0.0;
    /// Eigenvalues of the shifted matrix, ascending.
    Vec shifted;
    /// shifted + shift
    Vec eigenvalues;
    PlanewaveBasis basis;
};

/// c_ii = |h_i + t|^{2l}, c_ij = q_{h_i - h_j}.
ResonantBlock assemble_block(const ResonantIndexSet& set, const Lattice& lattice, int l, const FourierPotential& q);

struct ResonantMatch {
    std::size_t j = 0;
    double lambda = 0.0;
    /// Lambda_N - lambda_j
    double deviation = 0.0;
};

/// Eigenpair of the oracle belonging to the set: largest summed weight sum_i |b(N, h_i)|^2
/// among eigenvalues within window / 2 of |v|^{2l}; ties go to the larger weight on v.
std::size_t select_resonant_eigenpair(const BlochSpectrum& spectrum, const ResonantIndexSet& set, double window);

/// j minimizing |Lambda_N - lambda_j|.
ResonantMatch match_resonant(const BlochSpectrum& spectrum, const ResonantBlock& block, std::size_t N);

struct GershgorinCheck {
    double diagonal_min = 0.0;
    double diagonal_max = 0.0;
    double radius = 0.0;
    bool ok = true;
};

GershgorinCheck gershgorin_check(const ResonantBlock& block);

struct SeparationDiagnostics {
    std::size_t checked = 0;
    std::size_t violations = 0;
    /// min over checks of | |v|^{2l} - |h - gamma' - ... + t|^{2l} | / threshold(k+1)
    double min_ratio = 0.0;
};

/// Spot check of the energy separation for h in the set, gamma' in the support with
/// h - gamma' outside the set, followed by up to `extra_steps` further support steps.
SeparationDiagnostics separation_diagnostics(const ResonantIndexSet& set, const Lattice& lattice,
                                             const FourierPotential& q, const ParameterCascade& cascade,
                                             int extra_steps = 1);

}  // namespace polyharm

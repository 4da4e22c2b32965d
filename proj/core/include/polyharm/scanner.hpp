#pragma once

#include "polyharm/cascade.hpp"
#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"
#include "polyharm/potential.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace polyharm {

struct BandOptions {
    /// Plane-wave ball radius; 0 picks one from the free spectrum and the potential.
    double basis_radius = 0.0;
    /// Allowed eigenvalue change when the basis radius grows by two support radii.
    double tolerance = 1e-8;
    /// Restrict the grid to coordinates in [-1/2, 0], valid only for potentials even in every dual coordinate.
    bool symmetric = false;
    std::size_t workers = 1;
};

struct BandTable {
    /// Points per axis over the dual cell; t = sum (i_a / n_a - 1/2) gamma_a.
    std::vector<int> counts;
    int n_bands = 0;
    int l = 1;
    double basis_radius = 0.0;
    std::size_t basis_size = 0;
    Vec band_min;
    Vec band_max;
    /// Row per evaluated grid point, column per band.
    Mat values;
    /// Dual coordinates of each evaluated grid point.
    std::vector<std::vector<int>> points;
    /// Largest observed |Lambda_n(t) - Lambda_n(t')| / (|t - t'| 2l Lambda^{(2l-1)/2l}) over grid neighbors.
    double continuity_constant = 0.0;
    /// Largest change seen by the radius certificate.
    double certificate = 0.0;

    std::string csv(const Lattice& lattice, const std::string& header_comment = {}) const;
};

BandTable band_functions(const Lattice& lattice, int l, const FourierPotential& q, const std::vector<int>& counts,
                         int n_bands, const BandOptions& options = {});

struct GapReport {
    double e_min = 0.0;
    double e_max = 0.0;
    std::vector<std::pair<double, double>> gaps;
    bool stability_checked = false;
    bool stable = false;

    std::string json(const std::string& config_hash = {}) const;
};

/// Complement of the union of band ranges inside [e_min, e_max]. With require_cover set,
/// throws InsufficientBands unless the top band's minimum exceeds e_max.
GapReport gap_report(const BandTable& table, double e_min, double e_max, bool require_cover = true);

/// Gap report of `fine`, flagged stable when `coarse` finds the same gap count and endpoints to rel_tol.
GapReport gap_report_stable(const BandTable& coarse, const BandTable& fine, double e_min, double e_max,
                            double rel_tol = 1e-3, bool require_cover = true);

struct MeasureEstimate {
    double rho = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    /// counts[k]: samples at level k (0 = non-resonant).
    std::vector<std::size_t> counts;
    std::vector<double> fractions;
    std::vector<double> standard_errors;

    double fraction_u() const { return fractions.empty() ? 0.0 : fractions.front(); }
    std::string json(const std::string& config_hash = {}) const;
};

/// Uniform samples on |x| = rho classified with the cascade (whose rho should match).
MeasureEstimate measure_fraction(double rho, const Lattice& lattice, const ParameterCascade& cascade,
                                 std::size_t n_samples, std::uint64_t seed, std::size_t workers = 1);

}  // namespace polyharm

#pragma once

#include "polyharm/cascade.hpp"
#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"
#include "polyharm/planewave.hpp"
#include "polyharm/potential.hpp"

#include <limits>
#include <string>
#include <vector>

namespace polyharm {

struct SeriesOptions {
    /// Only support vectors with |gamma| < pool_radius enter the sums.
    double pool_radius = std::numeric_limits<double>::infinity();
    /// Denominators with |.| <= min_denominator * max(1, |a|) raise SmallDenominator.
    double min_denominator = 1e-12;
};

struct SeriesEvaluation {
    Vec v;
    int l = 1;
    int order = 0;
    /// a - |v|^{2l}
    double offset = 0.0;
    /// S_1..S_order (real parts)
    std::vector<double> S;
    std::vector<double> imag;
    /// Number of tuples with nonzero numerator, per order.
    std::vector<std::size_t> term_counts;
    /// Smallest |a - |v - sum|^{2l}| seen over all admissible partial tuples.
    double floor = std::numeric_limits<double>::infinity();

    /// A_order = sum of S_1..S_order
    double A() const;
};

/// S_1..S_k at a = |v|^{2l} + offset.
SeriesEvaluation evaluate_series(double offset, const Vec& v, int l, const FourierPotential& q, int k,
                                 const SeriesOptions& options = {});

/// S_k(a, v) with absolute a.
double s_k(double a, const Vec& v, int l, const FourierPotential& q, int k, const SeriesOptions& options = {});

struct KnownPartExpansion {
    Vec v;
    int l = 1;
    /// F_0..F_kmax
    std::vector<double> F;
    /// |v|^{2l}
    double base = 0.0;
    /// Denominator floor of the evaluation producing F_s (index s; F_0 has none).
    std::vector<double> floors;
    /// nominal error exponent 3 k alpha for P_k, k = 1..kmax+1
    std::vector<double> nominal_exponents;

    /// P_k = |v|^{2l} + F_{k-1}
    double prediction(int k) const;
};

/// F_0 = 0, F_s = A_s(|v|^{2l} + F_{s-1}, v), s = 1..k_max (k_max <= 6).
KnownPartExpansion known_part_sequence(const Vec& v, int l, const FourierPotential& q, int k_max,
                                       const SeriesOptions& options = {}, double alpha = 0.0);

/// Same, requiring v to be non-resonant under the cascade and k_max <= min(k1, 6).
KnownPartExpansion known_part_sequence(const Vec& v, const Lattice& lattice, const FourierPotential& q,
                                       const ParameterCascade& cascade, int k_max);

struct EigenMatch {
    std::size_t N = 0;
    /// Lambda_N - prediction
    double residual = 0.0;
    /// |b(N, gamma)|^2
    double weight = 0.0;
};

/// Among eigenpairs with |Lambda_N - prediction| < window / 2, the one with the
/// largest |b(N, gamma)|^2. The prediction is spectrum.shift + offset.
EigenMatch match_eigenvalue(const BlochSpectrum& spectrum, double offset, const IntCoords& gamma, double window);

struct SweepRow {
    double rho = 0.0;
    /// prediction index j: P = |v|^{2l} + F_j
    int j = 0;
    double error = 0.0;
    double weight = 0.0;
};

struct OrderSweep {
    std::vector<SweepRow> rows;
    /// log-log slope of error against rho, per j
    std::vector<std::pair<int, double>> slopes;

    std::string csv(const std::string& header_comment = {}) const;
};

struct SweepOptions {
    double window_radius = 0.0;
    bool refine = true;
    /// Matching window for match_eigenvalue.
    double match_window = 1.0;
    SeriesOptions series;
    std::size_t workers = 1;
};

/// For each center v (with quasimomentum from lattice reduction) and each j in
/// indices: |Lambda_N - (|v|^{2l} + F_j)| against a windowed oracle.
OrderSweep order_sweep(const Lattice& lattice, const FourierPotential& q, int l, const std::vector<Vec>& centers,
                       const std::vector<int>& indices, const SweepOptions& options);

/// Least-squares slope of log y against log x; nonpositive y are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace polyharm

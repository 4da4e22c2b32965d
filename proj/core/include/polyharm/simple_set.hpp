#pragma once

#include "polyharm/cascade.hpp"
#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"
#include "polyharm/planewave.hpp"
#include "polyharm/potential.hpp"
#include "polyharm/resonance.hpp"
#include "polyharm/series.hpp"

#include <string>
#include <vector>

namespace polyharm {

struct KnownPart {
    Vec v;
    /// F(v) - |v|^{2l}
    double offset = 0.0;
    /// |v|^{2l}
    double base = 0.0;
    KnownPartExpansion expansion;

    double value() const { return base + offset; }
};

/// F(v) = |v|^{2l} + F_s(v) with s = cascade.known_part_index().
KnownPart known_part(const Vec& v, const FourierPotential& q, const ParameterCascade& cascade);

struct KMember {
    LatticeVector gamma;
    ResonanceClass cls;
};

/// {gamma' : |F(v) - |gamma' + t|^{2l}| < window}, window = threshold(1) / 3 by default.
/// Members are tagged with their class under the l = 1 resonance sets.
std::vector<KMember> k_set(const Vec& v, const Vec& t, double known_value, const Lattice& lattice,
                           const ParameterCascade& cascade);
std::vector<KMember> k_set(const Vec& v, const Vec& t, double known_value, const Lattice& lattice,
                           const ParameterCascade& cascade, double window);

struct SimplicityMargin {
    IntCoords gamma;
    /// 12 for a non-resonant competitor, 13 for a resonant one.
    int condition = 12;
    int level = 0;
    /// |F(v) - F(gamma'+t)| - 2 eps1, or min_j |F(v) - lambda_j(gamma'+t)| - 2 eps1
    double margin = 0.0;
    double competitor = 0.0;
};

struct SimplicityReport {
    Vec v;
    IntCoords center;
    double known_value = 0.0;
    double known_offset = 0.0;
    double epsilon1 = 0.0;
    std::vector<KMember> k_members;
    std::vector<SimplicityMargin> margins;
    /// Premises: v non-resonant (l = 1 sets) and in the shrunk shell.
    bool premise = true;
    std::string premise_note;
    bool member = false;

    /// Competitor with the most negative margin, if any.
    const SimplicityMargin* worst() const;
};

/// The cascade with l = 1, used for U^1 / E^1 memberships.
ParameterCascade unit_degree(const ParameterCascade& cascade);

SimplicityReport check_simplicity(const Vec& v, const Lattice& lattice, const FourierPotential& q,
                                  const ParameterCascade& cascade);

struct CoefficientCheck {
    IntCoords gamma_prime;
    Complex predicted_first;
    /// sum_{k<n} A_k(gamma') with P = F(v)
    Complex predicted;
    Complex measured;
};

struct BlochVerifyReport {
    double weight = 0.0;
    double residual_mass = 0.0;
    std::vector<CoefficientCheck> coefficients;
    /// (1 + sum_k sum_* |A_k|^2)^{-1/2}
    double normalization_predicted = 1.0;
    /// (1 + sum_* |sum_k A_k|^2)^{-1/2}
    double normalization_combined = 1.0;
    double normalization_measured = 1.0;
};

/// Coefficients A_k(gamma'), k = 1..n-1, for all reachable gamma' != 0, at P = |v|^{2l} + p_offset.
std::vector<std::pair<IntCoords, std::vector<Complex>>> coefficient_series(const Vec& v, int l,
                                                                           const FourierPotential& q, double p_offset,
                                                                           int n);

/// Compares the eigenvector of eigenpair N with the first-order and order-n predictions.
/// Throws PhaseDegenerate when |b(N, gamma)|^2 < 1/2.
BlochVerifyReport bloch_verify(const BlochSpectrum& spectrum, std::size_t N, const IntCoords& gamma, const Vec& v,
                               const FourierPotential& q, int n, double p_offset = 0.0);

struct IsoenergeticPoint {
    Vec direction;
    Vec x;
    double radius = 0.0;
    /// F(x) - rho^{2l}
    double residual = 0.0;
    int iterations = 0;
    enum class Status { Ok, Resonant, NoBracket, SmallDenominator } status = Status::Ok;
    std::string note;
};

const char* to_string(IsoenergeticPoint::Status status);

/// Root of F(r u) = rho^{2l} along the unit ray u. Throws NoBracket.
IsoenergeticPoint isoenergetic_point(const Vec& direction, double rho, const FourierPotential& q,
                                     const ParameterCascade& cascade);

/// One point per ray, in ray order; rays ending in a resonant region or without a bracket
/// are reported with their status instead of throwing.
std::vector<IsoenergeticPoint> isoenergetic_sample(double rho, const Lattice& lattice, const FourierPotential& q,
                                                   const ParameterCascade& cascade,
                                                   const std::vector<Vec>& ray_directions, std::size_t workers = 1);

/// Window part of A(rho): | |x|^{2l} - rho^{2l} | < threshold(1) and some lambda in (rho^{2l} - 3 eps1, rho^{2l} + 3 eps1).
/// power_gap_to_rho = |x|^{2l} - rho^{2l}; lambda_offsets = lambda_i - rho^{2l}.
bool in_A_rho_window(double power_gap_to_rho, const Vec& lambda_offsets, double threshold1, double epsilon1);

/// For resonant x: builds the block at x with its witness directions and applies the window test.
/// Non-resonant x yields false.
bool in_A_rho(const Vec& x, const Lattice& lattice, const FourierPotential& q, const ParameterCascade& cascade);

}  // namespace polyharm

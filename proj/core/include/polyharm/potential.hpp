#pragma once

#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace polyharm {

struct FourierTerm {
    IntCoords n;
    Vec gamma;
    Complex value;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Trigonometric polynomial potential stored by its Fourier coefficients q_gamma.
/// Zero coefficients are dropped on construction.
class FourierPotential {
public:
    FourierPotential() = default;
    FourierPotential(const Lattice& lattice, const std::vector<std::pair<IntCoords, Complex>>& coefficients,
                     double smoothness = 0.0);

    int dimension() const noexcept { return dim_; }
    double smoothness() const noexcept { return smoothness_; }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    /// Terms sorted by (|gamma|^2, lexicographic coordinates).
    const std::vector<FourierTerm>& terms() const noexcept { return terms_; }

    /// q_n, zero outside the support.
    Complex coefficient(const IntCoords& n) const;
    bool contains(const IntCoords& n) const { return index_.count(n) != 0; }

    double support_radius() const noexcept { return support_radius_; }
    /// Sum of |q_gamma|; bounds the operator norm of multiplication by q.
    double l1_norm() const noexcept { return l1_; }
    /// Sum of |q_gamma|^2 (1 + |gamma|^{2s}).
    double sobolev_weight() const noexcept { return sobolev_; }
    /// True when every coefficient has zero imaginary part.
    bool real_coefficients() const noexcept { return real_; }

    FourierPotential scaled(double factor) const;

private:
    int dim_ = 0;
    double smoothness_ = 0.0;
    std::vector<FourierTerm> terms_;
    std::unordered_map<IntCoords, std::size_t, IntCoordsHash> index_;
    double support_radius_ = 0.0;
    double l1_ = 0.0;
    double sobolev_ = 0.0;
    bool real_ = true;
};

/// Zero mean and Hermitian symmetry q_{-gamma} = conj(q_gamma), to 1e-12 relative.
ValidationReport validate(const FourierPotential& q);

struct Truncation {
    FourierPotential potential;
    double tail_bound = 0.0;
};

/// Keeps |gamma| < radius; tail_bound is the sum of |q_gamma| dropped.
/// p, alpha, rho only document the nominal tail order rho^{-p alpha}.
Truncation truncate(const FourierPotential& q, const Lattice& lattice, double radius, double p = 0.0,
                    double alpha = 0.0, double rho = 0.0);

/// Deterministic random Hermitian potential supported in 0 < |gamma| <= support_radius,
/// rescaled so its Sobolev weight equals norm_budget (never exceeds it).
FourierPotential random_potential(std::uint64_t seed, const Lattice& lattice, double support_radius,
                                  double smoothness, double norm_budget);

/// amplitude * 2 cos(gamma_n . x) for each listed n.
FourierPotential cosine_potential(const Lattice& lattice, const std::vector<IntCoords>& directions,
                                  double amplitude, double smoothness = 0.0);

/// Records {"n": [...], "re": x, "im": y}; load rejects files that fail validate.
FourierPotential load_potential(const std::string& path, const Lattice& lattice, double smoothness = 0.0);
FourierPotential parse_potential(const std::string& json_text, const Lattice& lattice, double smoothness = 0.0);
std::string dump_potential(const FourierPotential& q);

}  // namespace polyharm

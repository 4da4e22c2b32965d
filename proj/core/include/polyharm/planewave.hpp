#pragma once

#include "polyharm/common.hpp"
#include "polyharm/lattice.hpp"
#include "polyharm/potential.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace polyharm {

/// Ordered set of plane-wave indices gamma, each standing for exp(i(gamma+t, x)).
class PlanewaveBasis {
public:
    enum class Mode { FullBall, Window };

    /// enumerate_ball(radius) including 0.
    static PlanewaveBasis full_ball(const Lattice& lattice, double radius);
    /// {gamma : |gamma + t - v| <= radius}.
    static PlanewaveBasis window(const Lattice& lattice, const Vec& t, const Vec& v, double radius);
    /// Union of windows around several centers; order follows the first center, then the next ones.
    static PlanewaveBasis windows(const Lattice& lattice, const Vec& t, const std::vector<Vec>& centers,
                                  double radius);
    /// Explicit index list, kept in the given order; duplicates are dropped.
    static PlanewaveBasis from_indices(const Lattice& lattice, const std::vector<IntCoords>& indices);

    Mode mode() const noexcept { return mode_; }
    const std::vector<LatticeVector>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    const Vec& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

    /// Position of n in the basis, or -1.
    long find(const IntCoords& n) const;

private:
    void add(const LatticeVector& g);

    Mode mode_ = Mode::Window;
    std::vector<LatticeVector> indices_;
    std::unordered_map<IntCoords, std::size_t, IntCoordsHash> lookup_;
    Vec center_;
    double radius_ = 0.0;
};

/// Matrix of multiplication by q in the basis: entry (i,j) = q_{gamma_i - gamma_j}.
CMat potential_matrix(const FourierPotential& q, const PlanewaveBasis& basis);

/// |gamma_i + t|^{2l} - |reference|^{2l} (reference defaults to 0).
Vec kinetic_diagonal(int l, const Vec& t, const PlanewaveBasis& basis, const std::optional<Vec>& reference = {});

/// Galerkin matrix of L_t in the basis, shifted by -|reference|^{2l} I when a reference is given.
CMat assemble(int l, const FourierPotential& q, const Vec& t, const PlanewaveBasis& basis,
              const std::optional<Vec>& reference = {});

struct BlochSpectrum {
    Vec t;
    int l = 1;
    /// Value subtracted from the diagonal before solving.
    double shift = 0.0;
    /// Eigenvalues of the shifted matrix, ascending.
    Vec shifted;
    /// shifted + shift
    Vec eigenvalues;
    /// Column N is the coefficient vector b(N, .) over basis.indices().
    CMat vectors;
    Vec residuals;
    /// Eigenvalue lies within 1e-9 of a neighbor.
    std::vector<bool> clustered;
    PlanewaveBasis basis;

    std::size_t count() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    Complex coefficient(std::size_t N, const IntCoords& n) const;
    double weight(std::size_t N, const IntCoords& n) const { return std::norm(coefficient(N, n)); }
    /// Index of the eigenpair maximizing |b(N, n)|^2.
    std::size_t dominant(const IntCoords& n) const;
};

/// Dense Hermitian eigendecomposition with residual and unit-norm certificate.
/// Throws ConvergenceFailure when a residual exceeds 1e-8 (1 + |Lambda|).
BlochSpectrum diagonalize(const CMat& H, double shift = 0.0);

/// Eigenvalues only, ascending; no certificate.
Vec eigenvalues_only(const CMat& H);

struct BlochSolveOptions {
    bool refine = true;
    double refine_factor = 1.5;
    double tolerance = 1e-9;
};

/// Windowed ground truth around v = gamma + t. The spectrum is shifted by |v|^{2l}.
/// With refine set, the eigenvalue dominated by gamma is recomputed on a window
/// refine_factor times larger and must agree to tolerance (1 + |Lambda|).
BlochSpectrum bloch_solve(int l, const FourierPotential& q, const Lattice& lattice, const Vec& t, const Vec& v,
                          double window_radius, const BlochSolveOptions& options = {});

/// CSV rows (t..., N, Lambda_N, |b(N, gamma*)|^2...) for the requested gamma*.
std::string spectrum_csv(const BlochSpectrum& spectrum, const std::vector<IntCoords>& tracked,
                         const std::string& header_comment = {});

}  // namespace polyharm

#pragma once

#include "polyharm/common.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace polyharm {

/// Dual basis of a period lattice. `basis` holds one period vector per row;
/// the returned rows satisfy (gamma_i, omega_j) = 2*pi*delta_ij.
/// Throws SingularBasis when |det| <= 1e-12 * scale^d.
Mat dual_lattice(const Mat& basis);

/// An element of the dual lattice: integer coordinates plus their embedding.
struct LatticeVector {
    IntCoords n;
    Vec gamma;
};

/// A quasimomentum t reduced into the half-open dual cell, together with
/// the point it was reduced from.
struct QuasiMomentum {
    Vec t;
    Vec representative;
};

/// Period lattice Omega together with its dual Gamma. Immutable.
class Lattice {
public:
    /// Rows of `basis` are the period vectors.
    explicit Lattice(Mat basis);

    /// Lattice whose dual is generated by the rows of `dual_basis`.
    static Lattice from_dual(const Mat& dual_basis);

    /// Omega = 2*pi*Z^d, so that Gamma = Z^d.
    static Lattice cubic(int d);

    int dimension() const noexcept { return static_cast<int>(basis_.rows()); }
    const Mat& basis() const noexcept { return basis_; }
    const Mat& dual_basis() const noexcept { return dual_; }
    double cell_volume() const noexcept { return volume_; }
    double dual_cell_volume() const noexcept { return dual_volume_; }

    /// True when the Gram matrix of the dual basis is integer valued; ball
    /// membership is then decided with exact integer norms.
    bool integral() const noexcept { return integral_; }

    Vec embed(const IntCoords& n) const;
    LatticeVector vector(const IntCoords& n) const;
    double norm2(const IntCoords& n) const;

    /// Real coordinates of x in the dual basis.
    Vec coordinates(const Vec& x) const;

    /// Integer coordinates of x if x lies on Gamma (within `tol` per coordinate).
    bool lattice_coordinates(const Vec& x, IntCoords& out, double tol = 1e-9) const;

    /// All gamma with |gamma| < radius (strict), optionally without 0, sorted by
    /// (|gamma|^2, lexicographic coordinates).
    std::vector<LatticeVector> enumerate_ball(double radius, bool exclude_zero) const;

    /// All gamma with |gamma - center| <= radius, sorted by
    /// (|gamma - center|^2, lexicographic coordinates).
    std::vector<LatticeVector> enumerate_window(const Vec& center, double radius) const;

    /// Splits x = gamma + t with t in the half-open dual cell.
    std::pair<LatticeVector, QuasiMomentum> reduce(const Vec& x) const;

private:
    void enumerate_box(const std::vector<int>& lo, const std::vector<int>& hi,
                       const std::function<void(const IntCoords&)>& visit) const;

    Mat basis_;
    Mat dual_;
    Mat gram_;
    std::vector<long long> int_gram_;
    double volume_ = 0.0;
    double dual_volume_ = 0.0;
    bool integral_ = false;
};

}  // namespace polyharm

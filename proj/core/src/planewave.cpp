#include "polyharm/planewave.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace polyharm {

void PlanewaveBasis::add(const LatticeVector& g) {
    if (lookup_.emplace(g.n, indices_.size()).second) indices_.push_back(g);
}

PlanewaveBasis PlanewaveBasis::full_ball(const Lattice& lattice, double radius) {
    PlanewaveBasis b;
    b.mode_ = Mode::FullBall;
    b.center_ = Vec::Zero(lattice.dimension());
    b.radius_ = radius;
    for (const auto& g : lattice.enumerate_ball(radius, false)) b.add(g);
    return b;
}

PlanewaveBasis PlanewaveBasis::window(const Lattice& lattice, const Vec& t, const Vec& v, double radius) {
    return windows(lattice, t, {v}, radius);
}

PlanewaveBasis PlanewaveBasis::windows(const Lattice& lattice, const Vec& t, const std::vector<Vec>& centers,
                                       double radius) {
    if (centers.empty()) throw Error(ErrorCode::InvalidArgument, "window basis needs a center");
    PlanewaveBasis b;
    b.mode_ = Mode::Window;
    b.center_ = centers.front();
    b.radius_ = radius;
    for (const auto& c : centers)
        for (const auto& g : lattice.enumerate_window(c - t, radius)) b.add(g);
    return b;
}

PlanewaveBasis PlanewaveBasis::from_indices(const Lattice& lattice, const std::vector<IntCoords>& indices) {
    PlanewaveBasis b;
    b.mode_ = Mode::Window;
    b.center_ = Vec::Zero(lattice.dimension());
    for (const auto& n : indices) b.add(lattice.vector(n));
    if (!b.indices_.empty()) b.center_ = b.indices_.front().gamma;
    return b;
}

long PlanewaveBasis::find(const IntCoords& n) const {
    auto it = lookup_.find(n);
    return it == lookup_.end() ? -1 : static_cast<long>(it->second);
}

CMat potential_matrix(const FourierPotential& q, const PlanewaveBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    CMat V = CMat::Zero(n, n);
    const auto& idx = basis.indices();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const auto& term : q.terms()) {
            if (is_zero(term.n)) continue;
            const long j = basis.find(idx[static_cast<std::size_t>(i)].n - term.n);
            if (j >= 0) V(i, j) = term.value;
        }
    }
    return V;
}

Vec kinetic_diagonal(int l, const Vec& t, const PlanewaveBasis& basis, const std::optional<Vec>& reference) {
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "degree l must be at least 1");
    const auto n = static_cast<Eigen::Index>(basis.size());
    Vec diag(n);
    const auto& idx = basis.indices();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec k = idx[static_cast<std::size_t>(i)].gamma + t;
        diag(i) = reference ? power_gap(k, *reference, l) : norm_power(k, l);
    }
    return diag;
}

CMat assemble(int l, const FourierPotential& q, const Vec& t, const PlanewaveBasis& basis,
              const std::optional<Vec>& reference) {
    if (basis.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty plane-wave basis");
    CMat H = potential_matrix(q, basis);
    H.diagonal() = kinetic_diagonal(l, t, basis, reference).cast<Complex>();
    return H;
}

Complex BlochSpectrum::coefficient(std::size_t N, const IntCoords& n) const {
    const long i = basis.find(n);
    if (i < 0) return {0.0, 0.0};
    return vectors(i, static_cast<Eigen::Index>(N));
}

std::size_t BlochSpectrum::dominant(const IntCoords& n) const {
    const long i = basis.find(n);
    if (i < 0) throw Error(ErrorCode::InvalidArgument, "index " + format_coords(n) + " is not in the basis");
    Eigen::Index best = 0;
    vectors.row(i).cwiseAbs2().maxCoeff(&best);
    return static_cast<std::size_t>(best);
}

namespace {

bool is_real(const CMat& H) { return H.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

BlochSpectrum diagonalize(const CMat& H, double shift) {
    if (H.rows() != H.cols() || H.rows() == 0) throw Error(ErrorCode::InvalidArgument, "matrix must be square");
    BlochSpectrum s;
    s.shift = shift;
    if (is_real(H)) {
        const Mat R = H.real();
        Eigen::SelfAdjointEigenSolver<Mat> solver(R);
        if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "eigensolver did not converge");
        s.shifted = solver.eigenvalues();
        s.vectors = solver.eigenvectors().cast<Complex>();
    } else {
        Eigen::SelfAdjointEigenSolver<CMat> solver(H);
        if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "eigensolver did not converge");
        s.shifted = solver.eigenvalues();
        s.vectors = solver.eigenvectors();
    }
    const auto n = s.shifted.size();
    s.eigenvalues = s.shifted.array() + shift;
    s.residuals.resize(n);
    s.clustered.assign(static_cast<std::size_t>(n), false);
    const CMat HV = H.selfadjointView<Eigen::Lower>() * s.vectors;
    for (Eigen::Index k = 0; k < n; ++k) {
        s.residuals(k) = (HV.col(k) - s.shifted(k) * s.vectors.col(k)).norm();
        const double bound = 1e-8 * (1.0 + std::abs(s.eigenvalues(k)));
        if (!(s.residuals(k) <= bound))
            throw Error(ErrorCode::ConvergenceFailure, "residual " + std::to_string(s.residuals(k)) +
                                                           " exceeds bound for eigenpair " + std::to_string(k));
        if (std::abs(s.vectors.col(k).norm() - 1.0) > 1e-10)
            throw Error(ErrorCode::ConvergenceFailure, "eigenvector " + std::to_string(k) + " is not unit norm");
        if (k > 0 && s.shifted(k) - s.shifted(k - 1) < 1e-9) {
            s.clustered[static_cast<std::size_t>(k)] = true;
            s.clustered[static_cast<std::size_t>(k - 1)] = true;
        }
    }
    return s;
}

Vec eigenvalues_only(const CMat& H) {
    if (is_real(H)) {
        Eigen::SelfAdjointEigenSolver<Mat> solver(H.real(), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "eigensolver did not converge");
        return solver.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<CMat> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "eigensolver did not converge");
    return solver.eigenvalues();
}

namespace {

BlochSpectrum solve_window(int l, const FourierPotential& q, const Lattice& lattice, const Vec& t, const Vec& v,
                           double radius) {
    PlanewaveBasis basis = PlanewaveBasis::window(lattice, t, v, radius);
    BlochSpectrum s = diagonalize(assemble(l, q, t, basis, v), norm_power(v, l));
    s.t = t;
    s.l = l;
    s.basis = std::move(basis);
    return s;
}

}  // namespace

BlochSpectrum bloch_solve(int l, const FourierPotential& q, const Lattice& lattice, const Vec& t, const Vec& v,
                          double window_radius, const BlochSolveOptions& options) {
    if (!(window_radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "window radius must be non-negative");
    IntCoords center;
    if (!lattice.lattice_coordinates(v - t, center))
        throw Error(ErrorCode::InvalidArgument, "center v is not of the form gamma + t");
    BlochSpectrum coarse = solve_window(l, q, lattice, t, v, window_radius);
    if (coarse.basis.find(center) < 0)
        throw Error(ErrorCode::InvalidArgument, "window does not contain the center index");
    if (!options.refine) return coarse;

    const BlochSpectrum fine = solve_window(l, q, lattice, t, v, window_radius * options.refine_factor);
    const std::size_t a = coarse.dominant(center);
    const std::size_t b = fine.dominant(center);
    const double moved = std::abs(coarse.shifted(static_cast<Eigen::Index>(a)) - fine.shifted(static_cast<Eigen::Index>(b)));
    const double bound = options.tolerance * (1.0 + std::abs(coarse.eigenvalues(static_cast<Eigen::Index>(a))));
    if (!(moved < bound)) {
        std::ostringstream os;
        os << "tracked eigenvalue moved by " << moved << " when the window grew from " << window_radius << " to "
           << window_radius * options.refine_factor;
        throw Error(ErrorCode::WindowNotConverged, os.str());
    }
    return coarse;
}

std::string spectrum_csv(const BlochSpectrum& spectrum, const std::vector<IntCoords>& tracked,
                         const std::string& header_comment) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (!header_comment.empty()) os << "# " << header_comment << '\n';
    for (Eigen::Index i = 0; i < spectrum.t.size(); ++i) os << "t" << i << ',';
    os << "N,Lambda";
    for (const auto& n : tracked) {
        os << ",weight";
        for (int c : n) os << '_' << c;
    }
    os << '\n';
    for (std::size_t N = 0; N < spectrum.count(); ++N) {
        for (Eigen::Index i = 0; i < spectrum.t.size(); ++i) os << spectrum.t(i) << ',';
        os << N + 1 << ',' << spectrum.eigenvalues(static_cast<Eigen::Index>(N));
        for (const auto& n : tracked) os << ',' << spectrum.weight(N, n);
        os << '\n';
    }
    return os.str();
}

}  // namespace polyharm

#include "polyharm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polyharm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool coords_less(const IntCoords& a, const IntCoords& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Mat dual_lattice(const Mat& basis) {
    const auto d = basis.rows();
    if (d == 0 || basis.cols() != d)
        throw Error(ErrorCode::InvalidArgument, "basis must be a non-empty square matrix");
    if (!basis.allFinite()) throw Error(ErrorCode::InvalidArgument, "basis has non-finite entries");
    const double scale = basis.rowwise().norm().maxCoeff();
    const double det = basis.determinant();
    if (!(std::abs(det) > 1e-12 * std::pow(scale, static_cast<double>(d))))
        throw Error(ErrorCode::SingularBasis, "|det(basis)| = " + std::to_string(std::abs(det)));
    // rows of G satisfy G * B^T = 2 pi I
    return kTwoPi * Mat(basis.fullPivLu().inverse().transpose());
}

Lattice::Lattice(Mat basis) : basis_(std::move(basis)) {
    dual_ = dual_lattice(basis_);
    volume_ = std::abs(basis_.determinant());
    dual_volume_ = std::abs(dual_.determinant());
    gram_ = dual_ * dual_.transpose();
    const auto d = dimension();
    integral_ = true;
    int_gram_.assign(static_cast<std::size_t>(d * d), 0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double g = gram_(i, j);
            const double r = std::round(g);
            if (std::abs(g - r) > 1e-12 * std::max(1.0, std::abs(g))) integral_ = false;
            int_gram_[static_cast<std::size_t>(i * d + j)] = static_cast<long long>(r);
        }
}

Lattice Lattice::from_dual(const Mat& dual_basis) { return Lattice(dual_lattice(dual_basis)); }

Lattice Lattice::cubic(int d) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    return Lattice(kTwoPi * Mat::Identity(d, d));
}

Vec Lattice::embed(const IntCoords& n) const {
    Vec g = Vec::Zero(dimension());
    for (int i = 0; i < dimension(); ++i)
        if (n[static_cast<std::size_t>(i)] != 0) g += static_cast<double>(n[static_cast<std::size_t>(i)]) * dual_.row(i).transpose();
    return g;
}

LatticeVector Lattice::vector(const IntCoords& n) const { return {n, embed(n)}; }

double Lattice::norm2(const IntCoords& n) const {
    const int d = dimension();
    if (integral_) {
        long long s = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                s += static_cast<long long>(n[static_cast<std::size_t>(i)]) * n[static_cast<std::size_t>(j)] *
                     int_gram_[static_cast<std::size_t>(i * d + j)];
        return static_cast<double>(s);
    }
    return embed(n).squaredNorm();
}

Vec Lattice::coordinates(const Vec& x) const { return basis_ * x / kTwoPi; }

bool Lattice::lattice_coordinates(const Vec& x, IntCoords& out, double tol) const {
    const Vec c = coordinates(x);
    out.assign(static_cast<std::size_t>(dimension()), 0);
    for (int i = 0; i < dimension(); ++i) {
        const double r = std::round(c(i));
        if (std::abs(c(i) - r) > tol) return false;
        out[static_cast<std::size_t>(i)] = static_cast<int>(r);
    }
    return true;
}

void Lattice::enumerate_box(const std::vector<int>& lo, const std::vector<int>& hi,
                            const std::function<void(const IntCoords&)>& visit) const {
    const std::size_t d = lo.size();
    for (std::size_t i = 0; i < d; ++i)
        if (lo[i] > hi[i]) return;
    IntCoords n = lo;
    while (true) {
        visit(n);
        std::size_t i = 0;
        for (; i < d; ++i) {
            if (n[i] < hi[i]) {
                ++n[i];
                break;
            }
            n[i] = lo[i];
        }
        if (i == d) return;
    }
}

std::vector<LatticeVector> Lattice::enumerate_ball(double radius, bool exclude_zero) const {
    if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
    const int d = dimension();
    std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const int b = static_cast<int>(std::floor(basis_.row(i).norm() * radius / kTwoPi)) + 1;
        lo[static_cast<std::size_t>(i)] = -b;
        hi[static_cast<std::size_t>(i)] = b;
    }
    const double r2 = radius * radius;
    const double cut_integral = r2 * (1.0 - 1e-12);
    const double cut = radius * (1.0 - 1e-9);
    std::vector<std::pair<double, IntCoords>> found;
    enumerate_box(lo, hi, [&](const IntCoords& n) {
        if (exclude_zero && is_zero(n)) return;
        const double n2 = norm2(n);
        const bool inside = integral_ ? n2 < cut_integral : std::sqrt(n2) < cut;
        if (inside) found.emplace_back(n2, n);
    });
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return coords_less(a.second, b.second);
    });
    std::vector<LatticeVector> out;
    out.reserve(found.size());
    for (auto& [n2, n] : found) out.push_back(vector(n));
    return out;
}

std::vector<LatticeVector> Lattice::enumerate_window(const Vec& center, double radius) const {
    if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
    const int d = dimension();
    const Vec c = coordinates(center);
    std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double w = basis_.row(i).norm() * radius / kTwoPi;
        lo[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(c(i) - w)) - 1;
        hi[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil(c(i) + w)) + 1;
    }
    const double cut = radius * radius * (1.0 + 1e-12);
    std::vector<std::pair<double, IntCoords>> found;
    enumerate_box(lo, hi, [&](const IntCoords& n) {
        const double dist2 = (embed(n) - center).squaredNorm();
        if (dist2 <= cut) found.emplace_back(dist2, n);
    });
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return coords_less(a.second, b.second);
    });
    std::vector<LatticeVector> out;
    out.reserve(found.size());
    for (auto& [dist2, n] : found) out.push_back(vector(n));
    return out;
}

std::pair<LatticeVector, QuasiMomentum> Lattice::reduce(const Vec& x) const {
    if (x.size() != dimension()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch in reduce");
    if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite point in reduce");
    const Vec c = coordinates(x);
    IntCoords n(static_cast<std::size_t>(dimension()));
    for (int i = 0; i < dimension(); ++i) {
        double f = std::floor(c(i));
        // fractional parts a rounding error below 1 belong to the next cell
        if (c(i) - f > 1.0 - 1e-12) f += 1.0;
        n[static_cast<std::size_t>(i)] = static_cast<int>(f);
    }
    LatticeVector g = vector(n);
    QuasiMomentum t{x - g.gamma, x};
    return {std::move(g), std::move(t)};
}

}  // namespace polyharm

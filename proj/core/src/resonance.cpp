#include "polyharm/resonance.hpp"

#include <cmath>
#include <numeric>

namespace polyharm {

VMembership in_V(const Vec& x, const Vec& b, int l, double threshold, double rho) {
    if (b.squaredNorm() == 0.0) throw Error(ErrorCode::InvalidArgument, "direction b must be nonzero");
    VMembership r;
    const double gap = std::abs(power_gap(x, x + b, l));
    r.margin = gap - threshold;
    const double nx = x.norm();
    r.in_shell = nx > rho / 2.0 && nx < 1.5 * rho;
    r.member = r.in_shell && gap < threshold * (1.0 - 1e-9);
    return r;
}

int integer_rank(const std::vector<IntCoords>& vectors) {
    if (vectors.empty()) return 0;
    const std::size_t rows = vectors.size();
    const std::size_t cols = vectors.front().size();
    std::vector<std::vector<long long>> a(rows, std::vector<long long>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = vectors[i][j];
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[row]);
        for (std::size_t i = row + 1; i < rows; ++i) {
            if (a[i][col] == 0) continue;
            const long long f = a[i][col], g = a[row][col];
            long long common = 0;
            for (std::size_t j = col; j < cols; ++j) {
                a[i][j] = a[i][j] * g - a[row][j] * f;
                const long long v = a[i][j] < 0 ? -a[i][j] : a[i][j];
                common = std::gcd(common, v);
            }
            if (common > 1)
                for (std::size_t j = col; j < cols; ++j) a[i][j] /= common;
        }
        ++row;
        ++rank;
    }
    return rank;
}

std::vector<LatticeVector> direction_pool(const Lattice& lattice, const ParameterCascade& cascade) {
    return lattice.enumerate_ball(cascade.pool_radius(), true);
}

ResonanceClass classify(const Vec& x, const Lattice& lattice, const ParameterCascade& cascade) {
    return classify(x, direction_pool(lattice, cascade), cascade);
}

ResonanceClass classify(const Vec& x, const std::vector<LatticeVector>& pool, const ParameterCascade& cascade) {
    const double nx = x.norm();
    if (!(nx > cascade.shell_inner() && nx < cascade.shell_outer()))
        throw Error(ErrorCode::ShellViolation, "|x| = " + std::to_string(nx) + " outside (" +
                                                   std::to_string(cascade.shell_inner()) + ", " +
                                                   std::to_string(cascade.shell_outer()) + ")");
    const int l = cascade.l;
    std::vector<double> gaps(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) gaps[i] = std::abs(power_gap(x, x + pool[i].gamma, l));

    ResonanceClass out;
    out.min_margin = std::numeric_limits<double>::infinity();
    const double thr1 = cascade.threshold(1);
    for (double g : gaps) out.min_margin = std::min(out.min_margin, g - thr1);

    for (int k = 1; k <= cascade.d; ++k) {
        const double thr = cascade.threshold(k);
        std::vector<std::size_t> chosen;
        std::vector<IntCoords> basis;
        for (std::size_t i = 0; i < pool.size() && static_cast<int>(chosen.size()) < k; ++i) {
            if (!(gaps[i] < thr * (1.0 - 1e-9))) continue;
            basis.push_back(pool[i].n);
            if (integer_rank(basis) == static_cast<int>(basis.size()))
                chosen.push_back(i);
            else
                basis.pop_back();
        }
        if (static_cast<int>(chosen.size()) < k) break;
        out.level = k;
        out.directions.clear();
        out.margins.clear();
        for (std::size_t i : chosen) {
            out.directions.push_back(pool[i]);
            out.margins.push_back(gaps[i] - thr);
        }
    }
    out.beyond_regime = out.level >= cascade.d;
    return out;
}

ProjectionBound projection_bound(const Vec& x, const std::vector<LatticeVector>& directions,
                                 const ParameterCascade& cascade) {
    ProjectionBound out;
    const int k = static_cast<int>(directions.size());
    std::vector<Vec> ortho;
    for (const auto& dir : directions) {
        Vec u = dir.gamma;
        for (const auto& e : ortho) u -= u.dot(e) * e;
        const double n = u.norm();
        if (n < 1e-12 * std::max(1.0, dir.gamma.norm()))
            throw Error(ErrorCode::InvalidArgument, "directions are linearly dependent");
        ortho.push_back(u / n);
    }
    out.components.resize(k);
    for (int i = 0; i < k; ++i) out.components(i) = x.dot(ortho[static_cast<std::size_t>(i)]);
    if (k == 0) return out;
    out.bound = cascade.constant("projection") *
                std::pow(cascade.rho, cascade.effective_alpha_k(k) + (k - 1) * cascade.effective_alpha());
    out.within = out.components.cwiseAbs().maxCoeff() <= out.bound;
    return out;
}

}  // namespace polyharm

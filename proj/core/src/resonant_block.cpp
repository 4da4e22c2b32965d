#include "polyharm/resonant_block.hpp"

#include "polyharm/resonance.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_set>

namespace polyharm {

std::vector<IntCoords> ResonantIndexSet::indices() const {
    std::vector<IntCoords> out;
    out.reserve(offsets.size());
    for (const auto& o : offsets) out.push_back(center + o);
    return out;
}

namespace {

std::vector<IntCoords> inner_set(const std::vector<LatticeVector>& directions, double radius) {
    const auto k = static_cast<Eigen::Index>(directions.size());
    const auto d = directions.front().gamma.size();
    Mat D(d, k);
    for (Eigen::Index i = 0; i < k; ++i) D.col(i) = directions[static_cast<std::size_t>(i)].gamma;
    const Mat gram_inv = (D.transpose() * D).inverse();
    std::vector<int> bound(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i)
        bound[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(radius * std::sqrt(gram_inv(i, i)))) + 1;

    std::set<IntCoords> found;
    std::vector<int> n(static_cast<std::size_t>(k));
    const IntCoords zero(static_cast<std::size_t>(d), 0);
    std::function<void(Eigen::Index)> rec = [&](Eigen::Index i) {
        if (i == k) {
            IntCoords b = zero;
            Vec bv = Vec::Zero(d);
            for (Eigen::Index j = 0; j < k; ++j) {
                const int c = n[static_cast<std::size_t>(j)];
                if (c == 0) continue;
                const auto& dir = directions[static_cast<std::size_t>(j)];
                for (std::size_t s = 0; s < b.size(); ++s) b[s] += c * dir.n[s];
                bv += c * dir.gamma;
            }
            if (bv.norm() < radius * (1.0 - 1e-9) || is_zero(b)) found.insert(b);
            return;
        }
        for (int c = -bound[static_cast<std::size_t>(i)]; c <= bound[static_cast<std::size_t>(i)]; ++c) {
            n[static_cast<std::size_t>(i)] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return {found.begin(), found.end()};
}

}  // namespace

ResonantIndexSet build_index_set(const Lattice& lattice, const Vec& v, const Vec& t,
                                 const std::vector<LatticeVector>& directions, const ParameterCascade& cascade) {
    const int k = static_cast<int>(directions.size());
    if (k == 0) throw Error(ErrorCode::EmptyDirections, "resonant index set needs at least one direction");
    if (k > cascade.d - 1) throw Error(ErrorCode::InvalidArgument, "level k must not exceed d - 1");
    return build_index_set(lattice, v, t, directions, cascade.block_radius(k), cascade.shift_radius());
}

ResonantIndexSet build_index_set(const Lattice& lattice, const Vec& v, const Vec& t,
                                 const std::vector<LatticeVector>& directions, double block_radius,
                                 double shift_radius) {
    if (directions.empty()) throw Error(ErrorCode::EmptyDirections, "resonant index set needs at least one direction");
    std::vector<IntCoords> dir_coords;
    for (const auto& dir : directions) dir_coords.push_back(dir.n);
    if (integer_rank(dir_coords) != static_cast<int>(directions.size()))
        throw Error(ErrorCode::InvalidArgument, "directions are linearly dependent");

    ResonantIndexSet set;
    set.v = v;
    set.t = t;
    set.directions = directions;
    set.block_radius = block_radius;
    set.shift_radius = shift_radius;
    if (!lattice.lattice_coordinates(v - t, set.center))
        throw Error(ErrorCode::InvalidArgument, "center v is not of the form gamma + t");
    set.inner = inner_set(directions, block_radius);
    const auto shifts = lattice.enumerate_ball(shift_radius, false);
    set.shift_count = shifts.size();

    std::unordered_set<IntCoords, IntCoordsHash> seen;
    std::vector<std::pair<double, IntCoords>> all;
    for (const auto& b : set.inner)
        for (const auto& a : shifts) {
            IntCoords o = b + a.n;
            if (seen.insert(o).second) all.emplace_back(lattice.embed(o).squaredNorm(), o);
        }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return std::lexicographical_compare(x.second.begin(), x.second.end(), y.second.begin(), y.second.end());
    });
    for (auto& [n2, o] : all) set.offsets.push_back(std::move(o));
    return set;
}

ResonantBlock assemble_block(const ResonantIndexSet& set, const Lattice& lattice, int l, const FourierPotential& q) {
    ResonantBlock block;
    block.basis = PlanewaveBasis::from_indices(lattice, set.indices());
    block.shift = norm_power(set.v, l);
    block.matrix = assemble(l, q, set.t, block.basis, set.v);
    block.shifted = eigenvalues_only(block.matrix);
    block.eigenvalues = block.shifted.array() + block.shift;
    return block;
}

std::size_t select_resonant_eigenpair(const BlochSpectrum& spectrum, const ResonantIndexSet& set, double window) {
    std::vector<long> rows;
    for (const auto& h : set.indices()) {
        const long r = spectrum.basis.find(h);
        if (r >= 0) rows.push_back(r);
    }
    const long center_row = spectrum.basis.find(set.center);
    if (center_row < 0) throw Error(ErrorCode::InvalidArgument, "oracle basis does not contain the center");
    const double offset = norm_power(set.v, spectrum.l) - spectrum.shift;
    bool found = false;
    std::size_t best = 0;
    double best_sum = -1.0, best_center = -1.0;
    for (std::size_t N = 0; N < spectrum.count(); ++N) {
        const auto col = static_cast<Eigen::Index>(N);
        if (!(std::abs(spectrum.shifted(col) - offset) < window / 2.0)) continue;
        double sum = 0.0;
        for (long r : rows) sum += std::norm(spectrum.vectors(r, col));
        const double wc = std::norm(spectrum.vectors(center_row, col));
        if (!found || sum > best_sum + 1e-12 || (std::abs(sum - best_sum) <= 1e-12 && wc > best_center)) {
            best = N;
            best_sum = sum;
            best_center = wc;
            found = true;
        }
    }
    if (!found) throw Error(ErrorCode::NoCandidate, "no oracle eigenvalue near the resonant center");
    return best;
}

ResonantMatch match_resonant(const BlochSpectrum& spectrum, const ResonantBlock& block, std::size_t N) {
    if (N >= spectrum.count()) throw Error(ErrorCode::InvalidArgument, "eigenpair index out of range");
    const double lambda_n = spectrum.shifted(static_cast<Eigen::Index>(N)) + (spectrum.shift - block.shift);
    ResonantMatch m;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < block.shifted.size(); ++j) {
        const double dev = lambda_n - block.shifted(j);
        if (std::abs(dev) < best) {
            best = std::abs(dev);
            m = {static_cast<std::size_t>(j), block.eigenvalues(j), dev};
        }
    }
    return m;
}

GershgorinCheck gershgorin_check(const ResonantBlock& block) {
    GershgorinCheck g;
    const auto& C = block.matrix;
    const Vec diag = C.diagonal().real();
    g.diagonal_min = diag.minCoeff();
    g.diagonal_max = diag.maxCoeff();
    for (Eigen::Index i = 0; i < C.rows(); ++i) g.radius = std::max(g.radius, C.row(i).cwiseAbs().sum() - std::abs(C(i, i)));
    const double slack = 1e-9 * (1.0 + g.diagonal_max - g.diagonal_min + g.radius);
    g.ok = block.shifted.minCoeff() >= g.diagonal_min - g.radius - slack &&
           block.shifted.maxCoeff() <= g.diagonal_max + g.radius + slack;
    return g;
}

SeparationDiagnostics separation_diagnostics(const ResonantIndexSet& set, const Lattice& lattice,
                                             const FourierPotential& q, const ParameterCascade& cascade,
                                             int extra_steps) {
    SeparationDiagnostics diag;
    diag.min_ratio = std::numeric_limits<double>::infinity();
    const int k = static_cast<int>(set.directions.size());
    const double thr = cascade.threshold(k + 1);
    std::unordered_set<IntCoords, IntCoordsHash> members(set.offsets.begin(), set.offsets.end());
    std::vector<const FourierTerm*> steps;
    for (const auto& term : q.terms())
        if (!is_zero(term.n)) steps.push_back(&term);

    std::function<void(const IntCoords&, int)> probe = [&](const IntCoords& o, int depth) {
        const Vec x = set.v + lattice.embed(o);
        const double gap = std::abs(power_gap(set.v, x, cascade.l));
        ++diag.checked;
        const double ratio = thr > 0.0 ? gap / thr : std::numeric_limits<double>::infinity();
        diag.min_ratio = std::min(diag.min_ratio, ratio);
        if (gap <= thr / 5.0) ++diag.violations;
        if (depth < extra_steps)
            for (const FourierTerm* s : steps) probe(o - s->n, depth + 1);
    };
    for (const auto& o : set.offsets)
        for (const FourierTerm* g : steps) {
            const IntCoords out = o - g->n;
            if (members.count(out)) continue;
            probe(out, 0);
        }
    return diag;
}

}  // namespace polyharm

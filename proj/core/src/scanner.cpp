#include "polyharm/scanner.hpp"

#include "polyharm/parallel.hpp"
#include "polyharm/planewave.hpp"
#include "polyharm/resonance.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace polyharm {

namespace {

Vec grid_point(const Lattice& lattice, const std::vector<int>& idx, const std::vector<int>& counts) {
    Vec c(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a) c(static_cast<Eigen::Index>(a)) = static_cast<double>(idx[a]) / counts[a] - 0.5;
    return lattice.dual_basis().transpose() * c;
}

double auto_radius(const Lattice& lattice, int l, const FourierPotential& q, int n_bands) {
    const double t_max = 0.5 * lattice.dual_basis().rowwise().norm().sum();
    double r0 = 1.0;
    while (static_cast<int>(lattice.enumerate_ball(r0, false).size()) < n_bands) r0 *= 1.25;
    const double e_top = std::pow(r0 + t_max, 2.0 * l) + q.l1_norm();
    const double hop = std::max(q.support_radius(), lattice.dual_basis().rowwise().norm().minCoeff());
    return std::pow(e_top + q.l1_norm(), 1.0 / (2.0 * l)) + t_max + 2.0 * hop + 0.5;
}

Vec lowest_bands(const Mat& V, int l, const Vec& t, const PlanewaveBasis& basis, int n_bands) {
    Mat H = V;
    H.diagonal() = kinetic_diagonal(l, t, basis);
    Eigen::SelfAdjointEigenSolver<Mat> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "band eigensolver failed");
    return solver.eigenvalues().head(n_bands);
}

Vec lowest_bands(const CMat& V, int l, const Vec& t, const PlanewaveBasis& basis, int n_bands) {
    CMat H = V;
    H.diagonal() = kinetic_diagonal(l, t, basis).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "band eigensolver failed");
    return solver.eigenvalues().head(n_bands);
}

struct BandSolver {
    int l;
    int n_bands;
    PlanewaveBasis basis;
    bool real;
    Mat Vr;
    CMat Vc;

    BandSolver(const Lattice& lattice, int l_, const FourierPotential& q, int n, double radius)
        : l(l_), n_bands(n), basis(PlanewaveBasis::full_ball(lattice, radius)), real(q.real_coefficients()) {
        if (static_cast<int>(basis.size()) < n_bands)
            throw Error(ErrorCode::InsufficientBands, "basis of " + std::to_string(basis.size()) +
                                                          " plane waves cannot hold " + std::to_string(n_bands) +
                                                          " bands");
        const CMat V = potential_matrix(q, basis);
        if (real)
            Vr = V.real();
        else
            Vc = V;
    }

    Vec operator()(const Vec& t) const {
        return real ? lowest_bands(Vr, l, t, basis, n_bands) : lowest_bands(Vc, l, t, basis, n_bands);
    }
};

}  // namespace

BandTable band_functions(const Lattice& lattice, int l, const FourierPotential& q, const std::vector<int>& counts,
                         int n_bands, const BandOptions& options) {
    const int d = lattice.dimension();
    if (static_cast<int>(counts.size()) != d) throw Error(ErrorCode::InvalidArgument, "grid needs one count per axis");
    for (int c : counts)
        if (c < 8) throw Error(ErrorCode::InvalidArgument, "grid needs at least 8 points per axis");
    if (n_bands < 1) throw Error(ErrorCode::InvalidArgument, "n_bands must be positive");

    BandTable table;
    table.counts = counts;
    table.n_bands = n_bands;
    table.l = l;
    table.basis_radius = options.basis_radius > 0.0 ? options.basis_radius : auto_radius(lattice, l, q, n_bands);
    const BandSolver solver(lattice, l, q, n_bands, table.basis_radius);
    table.basis_size = solver.basis.size();

    // radius certificate at the cell corner and center
    {
        const double hop = std::max(q.support_radius(), lattice.dual_basis().rowwise().norm().minCoeff());
        const BandSolver bigger(lattice, l, q, n_bands, table.basis_radius + 2.0 * hop);
        std::vector<std::vector<int>> probes{std::vector<int>(static_cast<std::size_t>(d), 0)};
        std::vector<int> mid(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) mid[static_cast<std::size_t>(a)] = counts[static_cast<std::size_t>(a)] / 2;
        probes.push_back(mid);
        for (const auto& p : probes) {
            const Vec t = grid_point(lattice, p, counts);
            const Vec a = solver(t), b = bigger(t);
            for (int n = 0; n < n_bands; ++n) {
                const double change = std::abs(a(n) - b(n)) / (1.0 + std::abs(b(n)));
                table.certificate = std::max(table.certificate, change);
            }
        }
        if (!(table.certificate <= options.tolerance)) {
            std::ostringstream os;
            os << "band eigenvalues moved by " << table.certificate << " (relative) when the basis radius grew from "
               << table.basis_radius;
            throw Error(ErrorCode::WindowNotConverged, os.str());
        }
    }

    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(c);
    std::vector<long> slot(total, -1);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<int> idx(static_cast<std::size_t>(d));
        std::size_t rest = flat;
        bool keep = true;
        for (int a = 0; a < d; ++a) {
            const int c = counts[static_cast<std::size_t>(a)];
            idx[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(c));
            rest /= static_cast<std::size_t>(c);
            if (options.symmetric && 2 * idx[static_cast<std::size_t>(a)] > c) keep = false;
        }
        if (!keep) continue;
        slot[flat] = static_cast<long>(table.points.size());
        table.points.push_back(std::move(idx));
    }

    table.values.resize(static_cast<Eigen::Index>(table.points.size()), n_bands);
    parallel_for(table.points.size(), options.workers, [&](std::size_t i) {
        table.values.row(static_cast<Eigen::Index>(i)) = solver(grid_point(lattice, table.points[i], counts)).transpose();
    });
    table.band_min = table.values.colwise().minCoeff().transpose();
    table.band_max = table.values.colwise().maxCoeff().transpose();

    for (std::size_t flat = 0; flat < total; ++flat) {
        if (slot[flat] < 0) continue;
        const auto& idx = table.points[static_cast<std::size_t>(slot[flat])];
        std::size_t stride = 1;
        for (int a = 0; a < d; ++a) {
            const int c = counts[static_cast<std::size_t>(a)];
            if (idx[static_cast<std::size_t>(a)] + 1 < c) {
                const long other = slot[flat + stride];
                if (other >= 0) {
                    const double step = lattice.dual_basis().row(a).norm() / c;
                    for (int n = 0; n < n_bands; ++n) {
                        const double lam = std::max(1.0, std::abs(table.values(slot[flat], n)));
                        const double scale = step * 2.0 * l * std::pow(lam, (2.0 * l - 1.0) / (2.0 * l));
                        const double diff = std::abs(table.values(slot[flat], n) - table.values(other, n));
                        table.continuity_constant = std::max(table.continuity_constant, diff / scale);
                    }
                }
            }
            stride *= static_cast<std::size_t>(c);
        }
    }
    return table;
}

std::string BandTable::csv(const Lattice& lattice, const std::string& header_comment) const {
    std::ostringstream os;
    os << std::setprecision(17);
    if (!header_comment.empty()) os << "# " << header_comment << '\n';
    const int d = lattice.dimension();
    for (int a = 0; a < d; ++a) os << 't' << a << ',';
    os << "n,Lambda\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec t = grid_point(lattice, points[i], counts);
        for (int n = 0; n < n_bands; ++n) {
            for (int a = 0; a < d; ++a) os << t(a) << ',';
            os << n + 1 << ',' << values(static_cast<Eigen::Index>(i), n) << '\n';
        }
    }
    return os.str();
}

GapReport gap_report(const BandTable& table, double e_min, double e_max, bool require_cover) {
    if (!(e_max > e_min)) throw Error(ErrorCode::InvalidArgument, "energy window is empty");
    if (table.n_bands < 1) throw Error(ErrorCode::InsufficientBands, "table has no bands");
    if (require_cover && !(table.band_min(table.n_bands - 1) > e_max)) {
        std::ostringstream os;
        os << "top band minimum " << table.band_min(table.n_bands - 1) << " does not exceed e_max " << e_max;
        throw Error(ErrorCode::InsufficientBands, os.str());
    }
    std::vector<std::pair<double, double>> ranges;
    for (int n = 0; n < table.n_bands; ++n) ranges.emplace_back(table.band_min(n), table.band_max(n));
    std::sort(ranges.begin(), ranges.end());

    GapReport r;
    r.e_min = e_min;
    r.e_max = e_max;
    double covered = e_min;
    for (const auto& [lo, hi] : ranges) {
        if (hi < covered) continue;
        if (lo > covered) {
            const double end = std::min(lo, e_max);
            if (end > covered) r.gaps.emplace_back(covered, end);
        }
        covered = std::max(covered, hi);
        if (covered >= e_max) break;
    }
    if (covered < e_max) r.gaps.emplace_back(covered, e_max);
    return r;
}

GapReport gap_report_stable(const BandTable& coarse, const BandTable& fine, double e_min, double e_max,
                            double rel_tol, bool require_cover) {
    const GapReport a = gap_report(coarse, e_min, e_max, require_cover);
    GapReport b = gap_report(fine, e_min, e_max, require_cover);
    b.stability_checked = true;
    b.stable = a.gaps.size() == b.gaps.size();
    for (std::size_t i = 0; b.stable && i < a.gaps.size(); ++i) {
        auto close = [&](double x, double y) { return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y)); };
        b.stable = close(a.gaps[i].first, b.gaps[i].first) && close(a.gaps[i].second, b.gaps[i].second);
    }
    return b;
}

std::string GapReport::json(const std::string& config_hash) const {
    nlohmann::json doc;
    if (!config_hash.empty()) doc["config_hash"] = config_hash;
    doc["e_min"] = e_min;
    doc["e_max"] = e_max;
    doc["gap_count"] = gaps.size();
    doc["gaps"] = nlohmann::json::array();
    for (const auto& [a, b] : gaps) doc["gaps"].push_back({a, b});
    doc["stability_checked"] = stability_checked;
    doc["stable"] = stable;
    return doc.dump(2);
}

MeasureEstimate measure_fraction(double rho, const Lattice& lattice, const ParameterCascade& cascade,
                                 std::size_t n_samples, std::uint64_t seed, std::size_t workers) {
    if (n_samples < 1000) throw Error(ErrorCode::InvalidArgument, "measure estimates need at least 1000 samples");
    const int d = lattice.dimension();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec> xs(n_samples, Vec(d));
    for (auto& x : xs) {
        double n = 0.0;
        while (!(n > 1e-12)) {
            for (int i = 0; i < d; ++i) x(i) = normal(rng);
            n = x.norm();
        }
        x *= rho / n;
    }
    const auto pool = direction_pool(lattice, cascade);
    std::vector<int> level(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t i) { level[i] = classify(xs[i], pool, cascade).level; });

    MeasureEstimate m;
    m.rho = rho;
    m.samples = n_samples;
    m.seed = seed;
    m.counts.assign(static_cast<std::size_t>(d + 1), 0);
    for (int k : level) ++m.counts[static_cast<std::size_t>(k)];
    for (std::size_t c : m.counts) {
        const double f = static_cast<double>(c) / static_cast<double>(n_samples);
        m.fractions.push_back(f);
        m.standard_errors.push_back(std::sqrt(f * (1.0 - f) / static_cast<double>(n_samples)));
    }
    return m;
}

std::string MeasureEstimate::json(const std::string& config_hash) const {
    nlohmann::json doc;
    if (!config_hash.empty()) doc["config_hash"] = config_hash;
    doc["rho"] = rho;
    doc["samples"] = samples;
    doc["seed"] = seed;
    doc["counts"] = counts;
    doc["fractions"] = fractions;
    doc["standard_errors"] = standard_errors;
    return doc.dump(2);
}

}  // namespace polyharm

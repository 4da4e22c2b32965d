#include "polyharm/series.hpp"

#include "polyharm/parallel.hpp"
#include "polyharm/resonance.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace polyharm {

double SeriesEvaluation::A() const {
    double sum = 0.0;
    for (double s : S) sum += s;
    return sum;
}

namespace {

struct SeriesWalker {
    const Vec& v;
    int l;
    const FourierPotential& q;
    int k_max;
    double offset;
    double den_cut;
    double reach;
    std::vector<const FourierTerm*> pool;
    std::vector<Complex> sums;
    std::vector<std::size_t> counts;
    double floor = std::numeric_limits<double>::infinity();
    IntCoords partial;
    Vec partial_vec;

    void walk(int depth, Complex numerator, Complex denominator) {
        for (const FourierTerm* term : pool) {
            IntCoords next = partial + term->n;
            if (is_zero(next)) continue;
            const Vec next_vec = partial_vec + term->gamma;
            const int remaining = k_max - depth;
            if (next_vec.norm() > (remaining + 1) * reach * (1.0 + 1e-9) + 1e-12) continue;

            const double den = offset + power_gap(v, v - next_vec, l);
            floor = std::min(floor, std::abs(den));
            if (!(std::abs(den) > den_cut)) {
                std::ostringstream os;
                os << "denominator " << den << " at partial sum " << format_coords(next) << " (order "
                   << depth + 1 << ")";
                throw Error(ErrorCode::SmallDenominator, os.str());
            }
            const Complex num = numerator * term->value;
            const Complex dd = denominator * den;
            const Complex closing = q.coefficient(-next);
            if (closing != Complex(0.0, 0.0)) {
                sums[static_cast<std::size_t>(depth)] += num * closing / dd;
                ++counts[static_cast<std::size_t>(depth)];
            }
            if (depth + 1 < k_max) {
                std::swap(partial, next);
                const Vec saved = partial_vec;
                partial_vec = next_vec;
                walk(depth + 1, num, dd);
                partial_vec = saved;
                std::swap(partial, next);
            }
        }
    }
};

}  // namespace

SeriesEvaluation evaluate_series(double offset, const Vec& v, int l, const FourierPotential& q, int k,
                                 const SeriesOptions& options) {
    if (k < 1 || k > kSeriesOrderCap)
        throw Error(ErrorCode::InvalidArgument, "series order must lie in 1.." + std::to_string(kSeriesOrderCap));
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "degree l must be at least 1");
    SeriesEvaluation e;
    e.v = v;
    e.l = l;
    e.order = k;
    e.offset = offset;
    e.S.assign(static_cast<std::size_t>(k), 0.0);
    e.imag.assign(static_cast<std::size_t>(k), 0.0);
    e.term_counts.assign(static_cast<std::size_t>(k), 0);

    const double a = norm_power(v, l) + offset;
    SeriesWalker w{v, l, q, k, offset, options.min_denominator * std::max(1.0, std::abs(a)), q.support_radius(),
                   {}, std::vector<Complex>(static_cast<std::size_t>(k)), std::vector<std::size_t>(static_cast<std::size_t>(k)),
                   std::numeric_limits<double>::infinity(), IntCoords(static_cast<std::size_t>(v.size()), 0),
                   Vec::Zero(v.size())};
    for (const auto& term : q.terms())
        if (!is_zero(term.n) && term.gamma.norm() < options.pool_radius) w.pool.push_back(&term);
    if (!w.pool.empty()) w.walk(0, Complex(1.0, 0.0), Complex(1.0, 0.0));

    for (int j = 0; j < k; ++j) {
        e.S[static_cast<std::size_t>(j)] = w.sums[static_cast<std::size_t>(j)].real();
        e.imag[static_cast<std::size_t>(j)] = w.sums[static_cast<std::size_t>(j)].imag();
        e.term_counts[static_cast<std::size_t>(j)] = w.counts[static_cast<std::size_t>(j)];
    }
    e.floor = w.floor;
    return e;
}

double s_k(double a, const Vec& v, int l, const FourierPotential& q, int k, const SeriesOptions& options) {
    return evaluate_series(a - norm_power(v, l), v, l, q, k, options).S.back();
}

double KnownPartExpansion::prediction(int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > F.size())
        throw Error(ErrorCode::InvalidArgument, "prediction index out of range");
    return base + F[static_cast<std::size_t>(k - 1)];
}

KnownPartExpansion known_part_sequence(const Vec& v, int l, const FourierPotential& q, int k_max,
                                       const SeriesOptions& options, double alpha) {
    if (k_max < 0 || k_max > kSeriesOrderCap)
        throw Error(ErrorCode::InvalidArgument, "k_max must lie in 0.." + std::to_string(kSeriesOrderCap));
    KnownPartExpansion out;
    out.v = v;
    out.l = l;
    out.base = norm_power(v, l);
    out.F.push_back(0.0);
    out.floors.push_back(std::numeric_limits<double>::infinity());
    for (int s = 1; s <= k_max; ++s) {
        const SeriesEvaluation e = evaluate_series(out.F.back(), v, l, q, s, options);
        out.F.push_back(e.A());
        out.floors.push_back(e.floor);
    }
    for (int k = 1; k <= k_max + 1; ++k) out.nominal_exponents.push_back(3.0 * k * alpha);
    return out;
}

KnownPartExpansion known_part_sequence(const Vec& v, const Lattice& lattice, const FourierPotential& q,
                                       const ParameterCascade& cascade, int k_max) {
    if (k_max > std::min(cascade.k1, kSeriesOrderCap))
        throw Error(ErrorCode::InvalidArgument, "k_max exceeds min(k1, " + std::to_string(kSeriesOrderCap) + ")");
    const ResonanceClass cls = classify(v, lattice, cascade);
    if (cls.resonant())
        throw Error(ErrorCode::InvalidArgument, "center is resonant (level " + std::to_string(cls.level) +
                                                    "); the non-resonant expansion does not apply");
    SeriesOptions options;
    options.pool_radius = cascade.series_pool_radius();
    return known_part_sequence(v, cascade.l, q, k_max, options, cascade.effective_alpha());
}

EigenMatch match_eigenvalue(const BlochSpectrum& spectrum, double offset, const IntCoords& gamma, double window) {
    const long row = spectrum.basis.find(gamma);
    if (row < 0) throw Error(ErrorCode::InvalidArgument, "index " + format_coords(gamma) + " is not in the basis");
    bool found = false;
    EigenMatch best;
    for (std::size_t N = 0; N < spectrum.count(); ++N) {
        const double residual = spectrum.shifted(static_cast<Eigen::Index>(N)) - offset;
        if (!(std::abs(residual) < window / 2.0)) continue;
        const double w = std::norm(spectrum.vectors(row, static_cast<Eigen::Index>(N)));
        if (!found || w > best.weight) {
            best = {N, residual, w};
            found = true;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "no eigenvalue within " << window / 2.0 << " of the prediction";
        throw Error(ErrorCode::NoCandidate, os.str());
    }
    return best;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

OrderSweep order_sweep(const Lattice& lattice, const FourierPotential& q, int l, const std::vector<Vec>& centers,
                       const std::vector<int>& indices, const SweepOptions& options) {
    int j_max = 0;
    for (int j : indices) {
        if (j < 0 || j > kSeriesOrderCap) throw Error(ErrorCode::InvalidArgument, "sweep index out of range");
        j_max = std::max(j_max, j);
    }
    std::vector<std::vector<SweepRow>> per_center(centers.size());
    parallel_for(centers.size(), options.workers, [&](std::size_t c) {
        const Vec& v = centers[c];
        const auto [g, t] = lattice.reduce(v);
        const KnownPartExpansion kp = known_part_sequence(v, l, q, j_max, options.series);
        BlochSolveOptions so;
        so.refine = options.refine;
        const BlochSpectrum spec = bloch_solve(l, q, lattice, t.t, v, options.window_radius, so);
        for (int j : indices) {
            const double f = kp.F[static_cast<std::size_t>(j)];
            const EigenMatch m = match_eigenvalue(spec, f, g.n, options.match_window);
            per_center[c].push_back({v.norm(), j, std::abs(m.residual), m.weight});
        }
    });
    OrderSweep out;
    for (auto& rows : per_center)
        for (auto& r : rows) out.rows.push_back(r);
    for (int j : indices) {
        std::vector<double> xs, ys;
        for (const auto& r : out.rows)
            if (r.j == j) {
                xs.push_back(r.rho);
                ys.push_back(r.error);
            }
        out.slopes.emplace_back(j, loglog_slope(xs, ys));
    }
    return out;
}

std::string OrderSweep::csv(const std::string& header_comment) const {
    std::ostringstream os;
    os << std::setprecision(17);
    if (!header_comment.empty()) os << "# " << header_comment << '\n';
    os << "rho,k,error,slope\n";
    std::map<int, double> slope_of(slopes.begin(), slopes.end());
    for (const auto& r : rows) os << r.rho << ',' << r.j + 1 << ',' << r.error << ',' << slope_of[r.j] << '\n';
    return os.str();
}

}  // namespace polyharm

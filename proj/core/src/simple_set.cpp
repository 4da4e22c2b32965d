#include "polyharm/simple_set.hpp"

#include "polyharm/parallel.hpp"
#include "polyharm/resonant_block.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace polyharm {

KnownPart known_part(const Vec& v, const FourierPotential& q, const ParameterCascade& cascade) {
    SeriesOptions options;
    options.pool_radius = cascade.series_pool_radius();
    KnownPart kp;
    kp.v = v;
    kp.expansion = known_part_sequence(v, cascade.l, q, cascade.known_part_index(), options, cascade.effective_alpha());
    kp.base = kp.expansion.base;
    kp.offset = kp.expansion.F.back();
    return kp;
}

ParameterCascade unit_degree(const ParameterCascade& cascade) {
    ParameterCascade c = cascade;
    c.l = 1;
    return c;
}

std::vector<KMember> k_set(const Vec& v, const Vec& t, double known_value, const Lattice& lattice,
                           const ParameterCascade& cascade) {
    return k_set(v, t, known_value, lattice, cascade, cascade.threshold(1) / 3.0);
}

std::vector<KMember> k_set(const Vec& v, const Vec& t, double known_value, const Lattice& lattice,
                           const ParameterCascade& cascade, double window) {
    if (window < 0.0) throw Error(ErrorCode::InvalidArgument, "K-set window must be non-negative");
    const int l = cascade.l;
    const double offset = known_value - norm_power(v, l);
    const double outer = std::pow(std::max(0.0, known_value + window), 1.0 / (2.0 * l)) * (1.0 + 1e-12) + 1e-12;
    const ParameterCascade unit = unit_degree(cascade);
    const auto pool = direction_pool(lattice, unit);
    std::vector<KMember> out;
    for (const auto& g : lattice.enumerate_window(-t, outer)) {
        const Vec x = g.gamma + t;
        const double diff = power_gap(v, x, l) + offset;
        const bool inside = window > 0.0 ? std::abs(diff) < window : diff == 0.0;
        if (!inside) continue;
        out.push_back({g, classify(x, pool, unit)});
    }
    return out;
}

const SimplicityMargin* SimplicityReport::worst() const {
    const SimplicityMargin* w = nullptr;
    for (const auto& m : margins)
        if (!w || m.margin < w->margin) w = &m;
    return w;
}

SimplicityReport check_simplicity(const Vec& v, const Lattice& lattice, const FourierPotential& q,
                                  const ParameterCascade& cascade) {
    SimplicityReport r;
    r.v = v;
    r.epsilon1 = cascade.epsilon1();
    const auto [g, tq] = lattice.reduce(v);
    const Vec& t = tq.t;
    r.center = g.n;

    const ParameterCascade unit = unit_degree(cascade);
    const double shrink = cascade.threshold(1) / cascade.rho;
    const double nv = v.norm();
    if (!(nv > cascade.shell_inner() + shrink && nv < cascade.shell_outer() - shrink)) {
        r.premise = false;
        r.premise_note = "outside the shrunk shell";
        return r;
    }
    const auto pool = direction_pool(lattice, unit);
    const ResonanceClass own = classify(v, pool, unit);
    if (own.resonant()) {
        r.premise = false;
        r.premise_note = "center is resonant (level " + std::to_string(own.level) + ")";
        return r;
    }

    const KnownPart kp = known_part(v, q, cascade);
    r.known_value = kp.value();
    r.known_offset = kp.offset;
    r.k_members = k_set(v, t, kp.value(), lattice, cascade);

    const int l = cascade.l;
    for (const auto& member : r.k_members) {
        if (member.gamma.n == g.n) continue;
        const Vec x = member.gamma.gamma + t;
        SimplicityMargin m;
        m.gamma = member.gamma.n;
        m.level = member.cls.level;
        if (!member.cls.resonant()) {
            const KnownPart other = known_part(x, q, cascade);
            const double diff = power_gap(v, x, l) + kp.offset - other.offset;
            m.condition = 12;
            m.competitor = other.value();
            m.margin = std::abs(diff) - 2.0 * r.epsilon1;
        } else {
            std::vector<LatticeVector> dirs = member.cls.directions;
            if (static_cast<int>(dirs.size()) > cascade.d - 1) dirs.resize(static_cast<std::size_t>(cascade.d - 1));
            const ResonantIndexSet set = build_index_set(lattice, x, t, dirs, cascade);
            const ResonantBlock block = assemble_block(set, lattice, l, q);
            const double base_gap = power_gap(v, x, l) + kp.offset;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < block.shifted.size(); ++j) {
                const double diff = base_gap - block.shifted(j);
                if (std::abs(diff) < best) {
                    best = std::abs(diff);
                    m.competitor = block.eigenvalues(j);
                }
            }
            m.condition = 13;
            m.margin = best - 2.0 * r.epsilon1;
        }
        r.margins.push_back(m);
    }
    r.member = true;
    for (const auto& m : r.margins)
        if (m.margin < 0.0) r.member = false;
    return r;
}

std::vector<std::pair<IntCoords, std::vector<Complex>>> coefficient_series(const Vec& v, int l,
                                                                           const FourierPotential& q, double p_offset,
                                                                           int n) {
    using Table = std::unordered_map<IntCoords, Complex, IntCoordsHash>;
    std::vector<Table> A;
    std::vector<IntCoords> order;
    std::unordered_map<IntCoords, std::size_t, IntCoordsHash> position;
    auto denom = [&](const IntCoords& w, const Vec& wv) {
        const double D = p_offset + power_gap(v, v + wv, l);
        if (!(std::abs(D) > 1e-12 * std::max(1.0, norm_power(v, l))))
            throw Error(ErrorCode::SmallDenominator, "coefficient denominator vanishes at " + format_coords(w));
        return D;
    };
    std::unordered_map<IntCoords, Vec, IntCoordsHash> embedding;
    auto note = [&](const IntCoords& w, const Vec& wv) {
        if (position.emplace(w, order.size()).second) {
            order.push_back(w);
            embedding.emplace(w, wv);
        }
    };
    if (n >= 2) {
        Table first;
        for (const auto& term : q.terms()) {
            if (is_zero(term.n)) continue;
            first[term.n] = term.value / denom(term.n, term.gamma);
            note(term.n, term.gamma);
        }
        A.push_back(std::move(first));
    }
    for (int k = 2; k <= n - 1; ++k) {
        Table next;
        for (const auto& [u, val] : A.back()) {
            const Vec& uv = embedding.at(u);
            for (const auto& term : q.terms()) {
                if (is_zero(term.n)) continue;
                IntCoords w = u + term.n;
                if (is_zero(w)) continue;
                note(w, uv + term.gamma);
                next[w] += term.value * val;
            }
        }
        for (auto& [w, val] : next) val /= denom(w, embedding.at(w));
        A.push_back(std::move(next));
    }
    std::vector<std::pair<IntCoords, std::vector<Complex>>> out;
    for (const auto& w : order) {
        std::vector<Complex> coeffs;
        for (const auto& table : A) {
            auto it = table.find(w);
            coeffs.push_back(it == table.end() ? Complex(0.0, 0.0) : it->second);
        }
        out.emplace_back(w, std::move(coeffs));
    }
    return out;
}

BlochVerifyReport bloch_verify(const BlochSpectrum& spectrum, std::size_t N, const IntCoords& gamma, const Vec& v,
                               const FourierPotential& q, int n, double p_offset) {
    if (N >= spectrum.count()) throw Error(ErrorCode::InvalidArgument, "eigenpair index out of range");
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "order n must be at least 1");
    const Complex b0 = spectrum.coefficient(N, gamma);
    BlochVerifyReport r;
    r.weight = std::norm(b0);
    if (r.weight < 0.5)
        throw Error(ErrorCode::PhaseDegenerate, "|b(N, gamma)|^2 = " + std::to_string(r.weight) + " < 1/2");
    const Complex phase = std::conj(b0) / std::abs(b0);
    const auto col = static_cast<Eigen::Index>(N);
    r.residual_mass = 0.0;
    for (std::size_t i = 0; i < spectrum.basis.size(); ++i) {
        if (spectrum.basis.indices()[i].n == gamma) continue;
        r.residual_mass += std::norm(spectrum.vectors(static_cast<Eigen::Index>(i), col));
    }
    r.normalization_measured = std::abs(b0 * phase);

    const int l = spectrum.l;
    const auto series = coefficient_series(v, l, q, p_offset, n);
    std::unordered_map<IntCoords, Complex, IntCoordsHash> total;
    double sum_sq = 0.0, sum_sq_combined = 0.0;
    for (const auto& [w, coeffs] : series) {
        Complex s(0.0, 0.0);
        for (const auto& c : coeffs) {
            s += c;
            sum_sq += std::norm(c);
        }
        sum_sq_combined += std::norm(s);
        total.emplace(w, s);
    }
    r.normalization_predicted = 1.0 / std::sqrt(1.0 + sum_sq);
    r.normalization_combined = 1.0 / std::sqrt(1.0 + sum_sq_combined);

    for (const auto& term : q.terms()) {
        if (is_zero(term.n)) continue;
        CoefficientCheck c;
        c.gamma_prime = term.n;
        const Vec w = v + term.gamma;
        c.predicted_first = term.value / power_gap(v, w, l);
        auto it = total.find(term.n);
        c.predicted = it == total.end() ? Complex(0.0, 0.0) : it->second;
        c.measured = spectrum.coefficient(N, gamma + term.n) / b0;
        r.coefficients.push_back(c);
    }
    return r;
}

const char* to_string(IsoenergeticPoint::Status status) {
    switch (status) {
        case IsoenergeticPoint::Status::Ok: return "ok";
        case IsoenergeticPoint::Status::Resonant: return "resonant";
        case IsoenergeticPoint::Status::NoBracket: return "no-bracket";
        case IsoenergeticPoint::Status::SmallDenominator: return "small-denominator";
    }
    return "unknown";
}

IsoenergeticPoint isoenergetic_point(const Vec& direction, double rho, const FourierPotential& q,
                                     const ParameterCascade& cascade) {
    const double dn = direction.norm();
    if (!(dn > 0.0)) throw Error(ErrorCode::InvalidArgument, "ray direction must be nonzero");
    const Vec u = direction / dn;
    const int l = cascade.l;
    SeriesOptions options;
    options.pool_radius = cascade.series_pool_radius();
    const int s = cascade.known_part_index();
    auto g = [&](double r) {
        const Vec x = r * u;
        const auto kp = known_part_sequence(x, l, q, s, options);
        return radial_power_gap(r, rho, l) + kp.F.back();
    };

    IsoenergeticPoint p;
    p.direction = u;
    double h = 0.01;
    double lo = rho * (1.0 - h), hi = rho * (1.0 + h);
    double glo = g(lo), ghi = g(hi);
    while (!(glo < 0.0 && ghi > 0.0) && h < 0.4) {
        h *= 2.0;
        lo = rho * (1.0 - h);
        hi = rho * (1.0 + h);
        glo = g(lo);
        ghi = g(hi);
    }
    if (!(glo < 0.0 && ghi > 0.0))
        throw Error(ErrorCode::NoBracket, "F - rho^{2l} does not change sign on the ray segment");

    int it = 0;
    for (; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (gm < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    double r = 0.5 * (lo + hi);
    double gr = g(r);
    for (int k = 0; k < 3; ++k) {
        const double step = 1e-6 * rho;
        const double slope = (g(r + step) - g(r - step)) / (2.0 * step);
        if (!(slope > 0.0)) break;
        const double cand = r - gr / slope;
        if (!(cand >= lo && cand <= hi)) break;
        const double gc = g(cand);
        if (!(std::abs(gc) < std::abs(gr))) break;
        r = cand;
        gr = gc;
    }
    p.radius = r;
    p.x = r * u;
    p.residual = gr;
    p.iterations = it;
    return p;
}

std::vector<IsoenergeticPoint> isoenergetic_sample(double rho, const Lattice& lattice, const FourierPotential& q,
                                                   const ParameterCascade& cascade,
                                                   const std::vector<Vec>& ray_directions, std::size_t workers) {
    const ParameterCascade unit = unit_degree(cascade);
    const auto pool = direction_pool(lattice, unit);
    std::vector<IsoenergeticPoint> out(ray_directions.size());
    parallel_for(ray_directions.size(), workers, [&](std::size_t i) {
        IsoenergeticPoint& p = out[i];
        p.direction = ray_directions[i];
        try {
            p = isoenergetic_point(ray_directions[i], rho, q, cascade);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoBracket)
                p.status = IsoenergeticPoint::Status::NoBracket;
            else if (e.code() == ErrorCode::SmallDenominator)
                p.status = IsoenergeticPoint::Status::SmallDenominator;
            else
                throw;
            p.note = e.what();
            return;
        }
        const ResonanceClass cls = classify(p.x, pool, unit);
        if (cls.resonant()) {
            p.status = IsoenergeticPoint::Status::Resonant;
            p.note = "level " + std::to_string(cls.level) + ", margin " + std::to_string(cls.margins.front());
        }
    });
    return out;
}

bool in_A_rho_window(double power_gap_to_rho, const Vec& lambda_offsets, double threshold1, double epsilon1) {
    if (!(std::abs(power_gap_to_rho) < threshold1)) return false;
    for (Eigen::Index i = 0; i < lambda_offsets.size(); ++i)
        if (std::abs(lambda_offsets(i)) < 3.0 * epsilon1) return true;
    return false;
}

bool in_A_rho(const Vec& x, const Lattice& lattice, const FourierPotential& q, const ParameterCascade& cascade) {
    const ParameterCascade unit = unit_degree(cascade);
    const ResonanceClass cls = classify(x, lattice, unit);
    if (!cls.resonant()) return false;
    const int l = cascade.l;
    const double rho_power = std::pow(cascade.rho, 2.0 * l);
    const double gap = radial_power_gap(x.norm(), cascade.rho, l);
    if (!(std::abs(gap) < cascade.threshold(1))) return false;
    std::vector<LatticeVector> dirs = cls.directions;
    if (static_cast<int>(dirs.size()) > cascade.d - 1) dirs.resize(static_cast<std::size_t>(cascade.d - 1));
    const auto [g, t] = lattice.reduce(x);
    const ResonantIndexSet set = build_index_set(lattice, x, t.t, dirs, cascade);
    const ResonantBlock block = assemble_block(set, lattice, l, q);
    const Vec offsets = block.shifted.array() + (block.shift - rho_power);
    return in_A_rho_window(gap, offsets, cascade.threshold(1), cascade.epsilon1());
}

}  // namespace polyharm

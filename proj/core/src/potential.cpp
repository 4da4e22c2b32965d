#include "polyharm/potential.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace polyharm {

namespace {

bool positive_representative(const IntCoords& n) {
    for (int c : n)
        if (c != 0) return c > 0;
    return false;
}

}  // namespace

FourierPotential::FourierPotential(const Lattice& lattice,
                                   const std::vector<std::pair<IntCoords, Complex>>& coefficients,
                                   double smoothness)
    : dim_(lattice.dimension()), smoothness_(smoothness) {
    if (smoothness < 0.0) throw Error(ErrorCode::PotentialInvalid, "smoothness must be non-negative");
    std::unordered_map<IntCoords, Complex, IntCoordsHash> merged;
    std::vector<IntCoords> order;
    for (const auto& [n, value] : coefficients) {
        if (static_cast<int>(n.size()) != dim_)
            throw Error(ErrorCode::PotentialInvalid, "coefficient " + format_coords(n) + " has wrong dimension");
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
            throw Error(ErrorCode::PotentialInvalid, "coefficient " + format_coords(n) + " is not finite");
        auto [it, fresh] = merged.emplace(n, value);
        if (fresh)
            order.push_back(n);
        else
            it->second += value;
    }
    for (const auto& n : order) {
        const Complex value = merged[n];
        if (value == Complex(0.0, 0.0)) continue;
        terms_.push_back({n, lattice.embed(n), value});
    }
    std::sort(terms_.begin(), terms_.end(), [&](const FourierTerm& a, const FourierTerm& b) {
        const double na = lattice.norm2(a.n), nb = lattice.norm2(b.n);
        if (na != nb) return na < nb;
        return std::lexicographical_compare(a.n.begin(), a.n.end(), b.n.begin(), b.n.end());
    });
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& term = terms_[i];
        index_.emplace(term.n, i);
        const double norm = term.gamma.norm();
        support_radius_ = std::max(support_radius_, norm);
        l1_ += std::abs(term.value);
        sobolev_ += std::norm(term.value) * (1.0 + std::pow(norm, 2.0 * smoothness_));
        if (term.value.imag() != 0.0) real_ = false;
    }
}

Complex FourierPotential::coefficient(const IntCoords& n) const {
    auto it = index_.find(n);
    return it == index_.end() ? Complex(0.0, 0.0) : terms_[it->second].value;
}

FourierPotential FourierPotential::scaled(double factor) const {
    FourierPotential out = *this;
    out.terms_.clear();
    out.index_.clear();
    out.support_radius_ = out.l1_ = out.sobolev_ = 0.0;
    out.real_ = true;
    if (factor == 0.0) return out;
    for (const auto& term : terms_) {
        FourierTerm t = term;
        t.value *= factor;
        out.index_.emplace(t.n, out.terms_.size());
        out.support_radius_ = std::max(out.support_radius_, t.gamma.norm());
        out.l1_ += std::abs(t.value);
        out.sobolev_ += std::norm(t.value) * (1.0 + std::pow(t.gamma.norm(), 2.0 * smoothness_));
        if (t.value.imag() != 0.0) out.real_ = false;
        out.terms_.push_back(std::move(t));
    }
    return out;
}

ValidationReport validate(const FourierPotential& q) {
    ValidationReport report;
    for (const auto& term : q.terms()) {
        if (is_zero(term.n)) {
            report.ok = false;
            report.violations.push_back("zero-mean violated: q_0 = " + std::to_string(term.value.real()) +
                                        (term.value.imag() != 0.0 ? " + " + std::to_string(term.value.imag()) + "i"
                                                                  : std::string()));
            continue;
        }
        const Complex partner = q.coefficient(-term.n);
        const double tol = 1e-12 * std::max(1.0, std::abs(term.value));
        if (std::abs(partner - std::conj(term.value)) > tol) {
            report.ok = false;
            report.violations.push_back("hermitian symmetry violated at " + format_coords(term.n));
        }
    }
    if (!std::isfinite(q.sobolev_weight())) {
        report.ok = false;
        report.violations.push_back("sobolev weight is not finite");
    }
    return report;
}

Truncation truncate(const FourierPotential& q, const Lattice& lattice, double radius, double, double, double) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation radius must be positive");
    std::vector<std::pair<IntCoords, Complex>> kept;
    double tail = 0.0;
    for (const auto& term : q.terms()) {
        if (term.gamma.norm() < radius)
            kept.emplace_back(term.n, term.value);
        else
            tail += std::abs(term.value);
    }
    return {FourierPotential(lattice, kept, q.smoothness()), tail};
}

FourierPotential random_potential(std::uint64_t seed, const Lattice& lattice, double support_radius,
                                  double smoothness, double norm_budget) {
    if (!(support_radius >= 1.0)) throw Error(ErrorCode::InvalidArgument, "support_radius must be at least 1");
    if (norm_budget < 0.0) throw Error(ErrorCode::InvalidArgument, "norm_budget must be non-negative");
    if (norm_budget == 0.0) return FourierPotential(lattice, {}, smoothness);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::pair<IntCoords, Complex>> coeffs;
    double weight = 0.0;
    for (const auto& g : lattice.enumerate_window(Vec::Zero(lattice.dimension()), support_radius)) {
        if (!positive_representative(g.n)) continue;
        const Complex z(normal(rng), normal(rng));
        coeffs.emplace_back(g.n, z);
        coeffs.emplace_back(-g.n, std::conj(z));
        weight += 2.0 * std::norm(z) * (1.0 + std::pow(g.gamma.norm(), 2.0 * smoothness));
    }
    if (weight == 0.0) return FourierPotential(lattice, {}, smoothness);
    const double factor = std::sqrt(norm_budget / weight) * (1.0 - 1e-12);
    for (auto& c : coeffs) c.second *= factor;
    return FourierPotential(lattice, coeffs, smoothness);
}

FourierPotential cosine_potential(const Lattice& lattice, const std::vector<IntCoords>& directions, double amplitude,
                                  double smoothness) {
    std::vector<std::pair<IntCoords, Complex>> coeffs;
    for (const auto& n : directions) {
        coeffs.emplace_back(n, Complex(amplitude, 0.0));
        coeffs.emplace_back(-n, Complex(amplitude, 0.0));
    }
    return FourierPotential(lattice, coeffs, smoothness);
}

FourierPotential parse_potential(const std::string& json_text, const Lattice& lattice, double smoothness) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::PotentialInvalid, std::string("malformed potential file: ") + e.what());
    }
    const nlohmann::json* records = &doc;
    if (doc.is_object()) {
        if (doc.contains("smoothness")) smoothness = doc["smoothness"].get<double>();
        if (!doc.contains("coefficients"))
            throw Error(ErrorCode::PotentialInvalid, "potential object needs a 'coefficients' list");
        records = &doc["coefficients"];
    }
    if (!records->is_array()) throw Error(ErrorCode::PotentialInvalid, "potential must be a list of records");
    std::vector<std::pair<IntCoords, Complex>> coeffs;
    std::size_t index = 0;
    for (const auto& rec : *records) {
        try {
            IntCoords n = rec.at("n").get<IntCoords>();
            const double re = rec.value("re", 0.0);
            const double im = rec.value("im", 0.0);
            coeffs.emplace_back(std::move(n), Complex(re, im));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::PotentialInvalid,
                        "record " + std::to_string(index) + ": " + std::string(e.what()));
        }
        ++index;
    }
    FourierPotential q(lattice, coeffs, smoothness);
    const auto report = validate(q);
    if (!report.ok) {
        std::string msg;
        for (const auto& v : report.violations) msg += (msg.empty() ? "" : "; ") + v;
        throw Error(ErrorCode::PotentialInvalid, msg);
    }
    return q;
}

FourierPotential load_potential(const std::string& path, const Lattice& lattice, double smoothness) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::PotentialInvalid, "cannot open potential file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_potential(buf.str(), lattice, smoothness);
}

std::string dump_potential(const FourierPotential& q) {
    nlohmann::json doc;
    doc["smoothness"] = q.smoothness();
    doc["coefficients"] = nlohmann::json::array();
    for (const auto& term : q.terms())
        doc["coefficients"].push_back({{"n", term.n}, {"re", term.value.real()}, {"im", term.value.imag()}});
    return doc.dump(2);
}

}  // namespace polyharm

#include "polyharm/runner.hpp"

#include <polyharm/resonance.hpp>
#include <polyharm/resonant_block.hpp>
#include <polyharm/scanner.hpp>
#include <polyharm/series.hpp>
#include <polyharm/simple_set.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace polyharm::runner {

namespace {

using nlohmann::json;

json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const std::vector<LatticeVector>& dirs) {
    json a = json::array();
    for (const auto& g : dirs) a.push_back(g.n);
    return a;
}

std::string join(const IntCoords& n, char sep = ' ') {
    std::ostringstream os;
    for (std::size_t i = 0; i < n.size(); ++i) os << (i ? std::string(1, sep) : "") << n[i];
    return os.str();
}

class Context {
public:
    Context(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out)
        : cfg(cfg), out(out), quiet(opts.quiet), dir(opts.output_dir.empty() ? cfg.output_dir : opts.output_dir) {}

    const ExperimentConfig& cfg;
    std::ostream& out;
    bool quiet;
    std::filesystem::path dir;
    std::vector<std::string> artifacts;

    std::string stamp(const std::string& sub) const {
        return "polyharm " + sub + " config_hash=" + cfg.hash + " seed=" + std::to_string(cfg.seed);
    }

    json header(const std::string& sub) const {
        json doc;
        doc["subcommand"] = sub;
        doc["config_hash"] = cfg.hash;
        doc["seed"] = cfg.seed;
        return doc;
    }

    void write(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(dir);
        const auto path = dir / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
        f << content;
        if (content.empty() || content.back() != '\n') f << '\n';
        artifacts.push_back(path.string());
    }

    void say(const std::string& line) const {
        if (!quiet) out << line << '\n';
    }

    std::vector<double> rho_list() const {
        if (cfg.rho.empty()) throw Error(ErrorCode::ConfigError, cfg.origin + ": 'experiment.rho' is required");
        return cfg.rho;
    }

    std::vector<Vec> centers() const {
        const auto c = cfg.centers();
        if (c.empty())
            throw Error(ErrorCode::ConfigError,
                        cfg.origin + ": 'experiment.points' or 'experiment.direction' with 'experiment.rho' is required");
        return c;
    }

    /// One rho per point: a single configured rho, a matching list, or |x|.
    double rho_for(std::size_t i, const Vec& x) const {
        if (cfg.rho.size() == 1) return cfg.rho.front();
        if (!cfg.points.empty() && cfg.rho.size() == cfg.points.size()) return cfg.rho[i];
        if (cfg.points.empty() && i < cfg.rho.size()) return cfg.rho[i];
        return x.norm();
    }
};

void cmd_params(Context& ctx) {
    json doc = ctx.header("params");
    doc["runs"] = json::array();
    std::vector<double> rhos = ctx.cfg.rho.empty() ? std::vector<double>{10.0} : ctx.cfg.rho;
    for (double rho : rhos) {
        const auto c = ctx.cfg.cascade(rho);
        std::ostringstream os;
        os << std::setprecision(10);
        os << "mode " << to_string(c.mode) << "  d = " << c.d << "  l = " << c.l << "  s = " << c.s << "  p = " << c.p
           << "  rho = " << c.rho << '\n';
        os << "m = " << c.m << "  alpha = 1/" << c.m << " = " << c.alpha << "  k1 = " << c.k1 << "  p1 = " << c.p1
           << '\n';
        os << "alpha_k:";
        for (int k = 1; k <= c.d + 1; ++k) os << "  " << static_cast<int>(std::lround(std::pow(3.0, k))) << "/" << c.m;
        os << "\nepsilon1 = " << c.epsilon1() << "  pool radius = " << c.pool_radius()
           << "  shift radius = " << c.shift_radius() << '\n';
        os << "thresholds:";
        for (int k = 1; k <= c.d; ++k) os << "  " << c.threshold(k);
        os << '\n';
        for (const auto& chk : c.checks) {
            os << chk.name;
            if (chk.k) os << "(k=" << chk.k << ")";
            os << "  " << chk.expression << "  " << chk.lhs << " vs " << chk.rhs << "  " << (chk.ok ? "PASS" : "FAIL")
               << '\n';
        }
        os << (c.all_checks_pass() ? "all checks PASS" : "some checks FAIL");
        ctx.say(os.str());

        json r;
        r["rho"] = rho;
        r["mode"] = to_string(c.mode);
        r["d"] = c.d;
        r["l"] = c.l;
        r["s"] = c.s;
        r["p"] = c.p;
        r["m"] = c.m;
        r["alpha"] = c.alpha;
        r["alpha_k"] = std::vector<double>(c.alpha_k.begin() + 1, c.alpha_k.end());
        r["k1"] = c.k1;
        r["p1"] = c.p1;
        r["epsilon1"] = c.epsilon1();
        r["pool_radius"] = c.pool_radius();
        r["shift_radius"] = c.shift_radius();
        json thr = json::array();
        for (int k = 1; k <= c.d; ++k) thr.push_back(c.threshold(k));
        r["thresholds"] = thr;
        r["checks"] = json::array();
        for (const auto& chk : c.checks)
            r["checks"].push_back({{"name", chk.name}, {"k", chk.k}, {"expression", chk.expression},
                                   {"lhs", chk.lhs}, {"rhs", chk.rhs}, {"ok", chk.ok}});
        r["all_pass"] = c.all_checks_pass();
        doc["runs"].push_back(r);
    }
    ctx.write("params.json", doc.dump(2));
}

void cmd_classify(Context& ctx) {
    json doc = ctx.header("classify");
    doc["verdicts"] = json::array();
    const auto pts = ctx.centers();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = ctx.cfg.cascade(ctx.rho_for(i, pts[i]));
        const auto r = classify(pts[i], ctx.cfg.lattice, c);
        json v;
        v["x"] = to_json(pts[i]);
        v["rho"] = c.rho;
        v["level"] = r.level;
        v["verdict"] = r.resonant() ? "resonant" : "non-resonant";
        v["directions"] = to_json(r.directions);
        v["margins"] = r.margins;
        v["min_margin"] = r.min_margin;
        v["beyond_regime"] = r.beyond_regime;
        doc["verdicts"].push_back(v);
        ctx.say("point " + std::to_string(i) + ": level " + std::to_string(r.level));
    }
    ctx.write("classify.json", doc.dump(2));
}

void cmd_predict(Context& ctx) {
    json doc = ctx.header("predict");
    doc["predictions"] = json::array();
    const auto pts = ctx.centers();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = ctx.cfg.cascade(ctx.rho_for(i, pts[i]));
        const auto e = known_part_sequence(pts[i], ctx.cfg.lattice, ctx.cfg.potential, c, c.known_part_index());
        json p;
        p["v"] = to_json(pts[i]);
        p["rho"] = c.rho;
        p["base"] = e.base;
        p["F"] = e.F;
        p["floors"] = e.floors;
        json pred = json::array();
        for (std::size_t k = 1; k <= e.F.size(); ++k) pred.push_back(e.prediction(static_cast<int>(k)));
        p["P"] = pred;
        doc["predictions"].push_back(p);
        std::ostringstream os;
        os << std::setprecision(15) << "point " << i << ": F = " << e.F.back() << "  P = " << pred.back().get<double>();
        ctx.say(os.str());
    }
    ctx.write("predict.json", doc.dump(2));
}

void cmd_verify(Context& ctx) {
    SweepOptions o;
    o.window_radius = ctx.cfg.window_radius;
    o.match_window = ctx.cfg.match_window;
    o.workers = ctx.cfg.workers;
    if (ctx.cfg.overrides.series_pool_radius) o.series.pool_radius = *ctx.cfg.overrides.series_pool_radius;
    const auto sweep = order_sweep(ctx.cfg.lattice, ctx.cfg.potential, ctx.cfg.l, ctx.centers(), ctx.cfg.indices, o);
    ctx.write("verify.csv", sweep.csv(ctx.stamp("verify")));
    for (const auto& [j, slope] : sweep.slopes) {
        std::ostringstream os;
        os << "k = " << j + 1 << "  slope " << slope;
        ctx.say(os.str());
    }
}

void cmd_resonant_check(Context& ctx) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "# " << ctx.stamp("resonant-check") << '\n';
    for (int i = 0; i < ctx.cfg.d; ++i) csv << 'v' << i << ',';
    csv << "k,directions,b_k,j,lambda_j,Lambda_N,deviation\n";
    const auto pts = ctx.centers();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec& v = pts[i];
        const auto c = ctx.cfg.cascade(ctx.rho_for(i, v));
        std::vector<LatticeVector> dirs;
        if (!ctx.cfg.resonant.directions.empty()) {
            for (const auto& n : ctx.cfg.resonant.directions) dirs.push_back(ctx.cfg.lattice.vector(n));
        } else {
            dirs = classify(v, ctx.cfg.lattice, unit_degree(c)).directions;
            if (static_cast<int>(dirs.size()) > c.d - 1) dirs.resize(static_cast<std::size_t>(c.d - 1));
        }
        const auto [g, qm] = ctx.cfg.lattice.reduce(v);
        const int k = static_cast<int>(dirs.size());
        const double br = ctx.cfg.resonant.block_radius.value_or(k > 0 ? c.block_radius(k) : 0.0);
        const double sr = ctx.cfg.resonant.shift_radius.value_or(c.shift_radius());
        const auto set = build_index_set(ctx.cfg.lattice, v, qm.t, dirs, br, sr);
        const auto block = assemble_block(set, ctx.cfg.lattice, ctx.cfg.l, ctx.cfg.potential);
        const auto spec = bloch_solve(ctx.cfg.l, ctx.cfg.potential, ctx.cfg.lattice, qm.t, v, ctx.cfg.window_radius);
        const auto N = select_resonant_eigenpair(spec, set, ctx.cfg.match_window);
        const auto m = match_resonant(spec, block, N);
        for (Eigen::Index a = 0; a < v.size(); ++a) csv << v(a) << ',';
        std::string dl;
        for (const auto& dgv : dirs) dl += (dl.empty() ? "" : ";") + join(dgv.n);
        csv << k << ',' << dl << ',' << set.size() << ',' << m.j + 1 << ',' << block.eigenvalues(static_cast<Eigen::Index>(m.j))
            << ',' << spec.eigenvalues(static_cast<Eigen::Index>(N)) << ',' << m.deviation << '\n';
        std::ostringstream os;
        os << "point " << i << ": b_k = " << set.size() << "  deviation " << m.deviation;
        ctx.say(os.str());
    }
    ctx.write("resonant.csv", csv.str());
}

void cmd_simple_check(Context& ctx) {
    json doc = ctx.header("simple-check");
    doc["reports"] = json::array();
    const auto pts = ctx.centers();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = ctx.cfg.cascade(ctx.rho_for(i, pts[i]));
        const auto r = check_simplicity(pts[i], ctx.cfg.lattice, ctx.cfg.potential, c);
        json j;
        j["v"] = to_json(pts[i]);
        j["rho"] = c.rho;
        j["premise"] = r.premise;
        j["premise_note"] = r.premise_note;
        j["member"] = r.member;
        j["epsilon1"] = r.epsilon1;
        j["known_value"] = r.known_value;
        j["k_set"] = json::array();
        for (const auto& m : r.k_members)
            j["k_set"].push_back({{"gamma", m.gamma.n}, {"level", m.cls.level}, {"directions", to_json(m.cls.directions)}});
        j["margins"] = json::array();
        for (const auto& m : r.margins)
            j["margins"].push_back({{"gamma", m.gamma}, {"condition", m.condition}, {"level", m.level},
                                    {"margin", m.margin}, {"competitor", m.competitor}});
        doc["reports"].push_back(j);
        ctx.say("point " + std::to_string(i) + ": " + (r.member ? "member" : r.premise ? "not simple" : "premise fails"));
    }
    ctx.write("simple.json", doc.dump(2));
}

void cmd_bloch(Context& ctx) {
    json doc = ctx.header("bloch");
    doc["reports"] = json::array();
    const auto pts = ctx.centers();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec& v = pts[i];
        const auto c = ctx.cfg.cascade(ctx.rho_for(i, v));
        const auto [g, qm] = ctx.cfg.lattice.reduce(v);
        const auto spec = bloch_solve(ctx.cfg.l, ctx.cfg.potential, ctx.cfg.lattice, qm.t, v, ctx.cfg.window_radius);
        std::vector<IntCoords> tracked = ctx.cfg.tracked;
        if (tracked.empty()) tracked.push_back(g.n);
        ctx.write("bloch_" + std::to_string(i) + ".csv", spectrum_csv(spec, tracked, ctx.stamp("bloch")));

        double p_offset = 0.0;
        if (!classify(v, ctx.cfg.lattice, unit_degree(c)).resonant())
            p_offset = known_part(v, ctx.cfg.potential, c).offset;
        const auto N = spec.dominant(g.n);
        const auto rep = bloch_verify(spec, N, g.n, v, ctx.cfg.potential, ctx.cfg.verify_order, p_offset);
        json j;
        j["v"] = to_json(v);
        j["N"] = N + 1;
        j["Lambda"] = spec.eigenvalues(static_cast<Eigen::Index>(N));
        j["weight"] = rep.weight;
        j["residual_mass"] = rep.residual_mass;
        j["normalization_predicted"] = rep.normalization_predicted;
        j["normalization_combined"] = rep.normalization_combined;
        j["normalization_measured"] = rep.normalization_measured;
        j["coefficients"] = json::array();
        for (const auto& cc : rep.coefficients)
            j["coefficients"].push_back({{"gamma_prime", cc.gamma_prime},
                                         {"predicted_first", {cc.predicted_first.real(), cc.predicted_first.imag()}},
                                         {"predicted", {cc.predicted.real(), cc.predicted.imag()}},
                                         {"measured", {cc.measured.real(), cc.measured.imag()}}});
        doc["reports"].push_back(j);
        std::ostringstream os;
        os << "point " << i << ": weight " << rep.weight << "  residual mass " << rep.residual_mass;
        ctx.say(os.str());
    }
    ctx.write("bloch.json", doc.dump(2));
}

BandOptions band_options(const Context& ctx) {
    BandOptions o;
    o.basis_radius = ctx.cfg.basis_radius;
    o.symmetric = ctx.cfg.symmetric;
    o.workers = ctx.cfg.workers;
    return o;
}

void cmd_bands(Context& ctx) {
    const auto t = band_functions(ctx.cfg.lattice, ctx.cfg.l, ctx.cfg.potential, ctx.cfg.grid, ctx.cfg.bands,
                                  band_options(ctx));
    ctx.write("bands.csv", t.csv(ctx.cfg.lattice, ctx.stamp("bands")));
    std::ostringstream os;
    os << "basis " << t.basis_size << " plane waves, certificate " << t.certificate;
    ctx.say(os.str());
}

void cmd_gaps(Context& ctx) {
    const auto opts = band_options(ctx);
    const auto coarse = band_functions(ctx.cfg.lattice, ctx.cfg.l, ctx.cfg.potential, ctx.cfg.grid, ctx.cfg.bands, opts);
    GapReport r;
    if (!ctx.cfg.refined_grid.empty()) {
        const auto fine =
            band_functions(ctx.cfg.lattice, ctx.cfg.l, ctx.cfg.potential, ctx.cfg.refined_grid, ctx.cfg.bands, opts);
        r = gap_report_stable(coarse, fine, ctx.cfg.e_min, ctx.cfg.e_max);
    } else {
        r = gap_report(coarse, ctx.cfg.e_min, ctx.cfg.e_max);
    }
    json doc = ctx.header("gaps");
    doc.update(json::parse(r.json()));
    ctx.write("gaps.json", doc.dump(2));
    ctx.say(std::to_string(r.gaps.size()) + " gaps in [" + std::to_string(r.e_min) + ", " + std::to_string(r.e_max) +
            "]" + (r.stability_checked ? (r.stable ? ", stable" : ", NOT stable") : ""));
}

std::vector<Vec> ray_set(const ExperimentConfig& cfg) {
    if (!cfg.ray_directions.empty()) return cfg.ray_directions;
    std::vector<Vec> rays;
    if (cfg.d == 2) {
        for (int i = 0; i < cfg.rays; ++i) {
            const double a = 2.0 * std::numbers::pi * (i + 0.5) / cfg.rays;
            Vec u(2);
            u << std::cos(a), std::sin(a);
            rays.push_back(u);
        }
        return rays;
    }
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> n;
    for (int i = 0; i < cfg.rays; ++i) {
        Vec u(cfg.d);
        for (int a = 0; a < cfg.d; ++a) u(a) = n(rng);
        rays.push_back(u.normalized());
    }
    return rays;
}

void cmd_isoenergetic(Context& ctx) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "# " << ctx.stamp("isoenergetic") << '\n' << "rho,ray,status,";
    for (int i = 0; i < ctx.cfg.d; ++i) csv << 'x' << i << ',';
    csv << "radius,residual,iterations\n";
    const auto rays = ray_set(ctx.cfg);
    for (double rho : ctx.rho_list()) {
        const auto pts = isoenergetic_sample(rho, ctx.cfg.lattice, ctx.cfg.potential, ctx.cfg.cascade(rho), rays,
                                             ctx.cfg.workers);
        std::size_t ok = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            ok += p.status == IsoenergeticPoint::Status::Ok;
            csv << rho << ',' << i << ',' << to_string(p.status) << ',';
            for (int a = 0; a < ctx.cfg.d; ++a) csv << (p.x.size() ? p.x(a) : 0.0) << ',';
            csv << p.radius << ',' << p.residual << ',' << p.iterations << '\n';
        }
        ctx.say("rho " + std::to_string(rho) + ": " + std::to_string(ok) + "/" + std::to_string(pts.size()) +
                " rays on the surface");
    }
    ctx.write("isoenergetic.csv", csv.str());
}

void cmd_measure(Context& ctx) {
    json doc = ctx.header("measure");
    doc["estimates"] = json::array();
    for (double rho : ctx.rho_list()) {
        const auto m =
            measure_fraction(rho, ctx.cfg.lattice, ctx.cfg.cascade(rho), ctx.cfg.samples, ctx.cfg.seed, ctx.cfg.workers);
        doc["estimates"].push_back(json::parse(m.json()));
        std::ostringstream os;
        os << "rho " << rho << ": fraction in U " << m.fraction_u() << " +- " << m.standard_errors.front();
        ctx.say(os.str());
    }
    ctx.write("measure.json", doc.dump(2));
}

const std::map<std::string, std::function<void(Context&)>>& table() {
    static const std::map<std::string, std::function<void(Context&)>> t{
        {"params", cmd_params},       {"classify", cmd_classify},
        {"predict", cmd_predict},     {"verify", cmd_verify},
        {"resonant-check", cmd_resonant_check}, {"simple-check", cmd_simple_check},
        {"bloch", cmd_bloch},         {"bands", cmd_bands},
        {"gaps", cmd_gaps},           {"isoenergetic", cmd_isoenergetic},
        {"measure", cmd_measure},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"params", "classify",    "predict", "verify", "resonant-check", "simple-check",
                                                "bloch",  "bands",       "gaps",    "isoenergetic", "measure"};
    return names;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::SingularBasis:
        case ErrorCode::PotentialInvalid:
        case ErrorCode::CascadeInequalityViolated:
            return kConfigError;
        default:
            return kNumericalFailure;
    }
}

RunResult run(const std::string& subcommand, const ExperimentConfig& config, const RunOptions& options,
              std::ostream& out) {
    RunResult result;
    const auto it = table().find(subcommand);
    if (it == table().end()) {
        result.exit_code = kConfigError;
        result.message = "unknown subcommand '" + subcommand + "'";
        return result;
    }
    Context ctx(config, options, out);
    try {
        it->second(ctx);
    } catch (const Error& e) {
        result.exit_code = exit_code_for(e.code());
        result.message = e.what();
    } catch (const std::exception& e) {
        result.exit_code = kNumericalFailure;
        result.message = e.what();
    }
    result.artifacts = ctx.artifacts;
    return result;
}

}  // namespace polyharm::runner

#include "polyharm/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace polyharm::runner {

namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        const YAML::Mark m = node.Mark();
        std::ostringstream os;
        os << origin_;
        if (m.line >= 0) os << ':' << m.line + 1 << ':' << m.column + 1;
        os << ": " << msg;
        throw Error(ErrorCode::ConfigError, os.str());
    }

    void allow(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> keys) const {
        if (!map.IsMap()) fail(map, "'" + path + "' must be a mapping");
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) fail(kv.first, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
        }
    }

    template <class T>
    T scalar(const YAML::Node& node, const std::string& path) const {
        if (!node.IsScalar()) fail(node, "'" + path + "' must be a scalar");
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, "'" + path + "' has the wrong type");
        }
    }

    template <class T>
    void get(const YAML::Node& map, const char* key, const std::string& path, T& out) const {
        if (const auto n = map[key]) out = scalar<T>(n, path + "." + key);
    }

    template <class T>
    void get(const YAML::Node& map, const char* key, const std::string& path, std::optional<T>& out) const {
        if (const auto n = map[key]) out = scalar<T>(n, path + "." + key);
    }

    template <class T>
    std::vector<T> list(const YAML::Node& node, const std::string& path) const {
        std::vector<T> out;
        if (node.IsScalar()) {
            out.push_back(scalar<T>(node, path));
            return out;
        }
        if (!node.IsSequence()) fail(node, "'" + path + "' must be a list");
        for (std::size_t i = 0; i < node.size(); ++i)
            out.push_back(scalar<T>(node[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

    Vec vector(const YAML::Node& node, const std::string& path, int d) const {
        const auto v = list<double>(node, path);
        if (static_cast<int>(v.size()) != d) fail(node, "'" + path + "' must have " + std::to_string(d) + " entries");
        return Eigen::Map<const Vec>(v.data(), d);
    }

    std::vector<Vec> vectors(const YAML::Node& node, const std::string& path, int d) const {
        if (!node.IsSequence()) fail(node, "'" + path + "' must be a list of vectors");
        std::vector<Vec> out;
        for (std::size_t i = 0; i < node.size(); ++i)
            out.push_back(vector(node[i], path + "[" + std::to_string(i) + "]", d));
        return out;
    }

    std::vector<IntCoords> int_vectors(const YAML::Node& node, const std::string& path, int d) const {
        if (!node.IsSequence()) fail(node, "'" + path + "' must be a list of integer vectors");
        std::vector<IntCoords> out;
        for (std::size_t i = 0; i < node.size(); ++i) {
            const std::string p = path + "[" + std::to_string(i) + "]";
            auto n = list<int>(node[i], p);
            if (static_cast<int>(n.size()) != d) fail(node[i], "'" + p + "' must have " + std::to_string(d) + " entries");
            out.push_back(std::move(n));
        }
        return out;
    }

    Mat matrix(const YAML::Node& node, const std::string& path) const {
        if (!node.IsSequence() || node.size() == 0) fail(node, "'" + path + "' must be a list of rows");
        const int d = static_cast<int>(node.size());
        Mat m(d, d);
        for (int i = 0; i < d; ++i) m.row(i) = vector(node[i], path + "[" + std::to_string(i) + "]", d).transpose();
        return m;
    }

private:
    std::string origin_;
};

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParameterCascade ExperimentConfig::cascade(double r) const {
    return derive_parameters(d, l, s, r, mode, overrides, constants);
}

std::vector<Vec> ExperimentConfig::centers() const {
    if (!points.empty()) return points;
    std::vector<Vec> out;
    if (direction)
        for (double r : rho) out.push_back(r * *direction);
    return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin, const std::string& base_dir) {
    const Reader rd(origin);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << origin << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
        throw Error(ErrorCode::ConfigError, os.str());
    }
    if (!root.IsMap()) throw Error(ErrorCode::ConfigError, origin + ": top level must be a mapping");
    rd.allow(root, "", {"lattice", "operator", "potential", "cascade", "experiment", "scan", "sampling", "run"});

    ExperimentConfig cfg;
    cfg.origin = origin;
    cfg.text = text;
    cfg.hash = fnv1a_hex(text);

    if (const auto lat = root["lattice"]) {
        rd.allow(lat, "lattice", {"cubic", "basis", "dual"});
        try {
            if (lat["basis"])
                cfg.lattice = Lattice(rd.matrix(lat["basis"], "lattice.basis"));
            else if (lat["dual"])
                cfg.lattice = Lattice::from_dual(rd.matrix(lat["dual"], "lattice.dual"));
            else if (lat["cubic"])
                cfg.lattice = Lattice::cubic(rd.scalar<int>(lat["cubic"], "lattice.cubic"));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError) throw;
            rd.fail(lat, e.what());
        }
    }
    cfg.d = cfg.lattice.dimension();
    const int d = cfg.d;
    cfg.grid.assign(static_cast<std::size_t>(d), 16);

    if (const auto op = root["operator"]) {
        rd.allow(op, "operator", {"d", "l", "s"});
        if (op["d"] && rd.scalar<int>(op["d"], "operator.d") != d)
            rd.fail(op["d"], "'operator.d' disagrees with the lattice dimension " + std::to_string(d));
        rd.get(op, "l", "operator", cfg.l);
        rd.get(op, "s", "operator", cfg.s);
        if (cfg.l < 1) rd.fail(op["l"], "'operator.l' must be at least 1");
    }

    cfg.potential = FourierPotential(cfg.lattice, {});
    cfg.potential_source = "zero";
    if (const auto pot = root["potential"]) {
        rd.allow(pot, "potential", {"zero", "cosine", "random", "file", "smoothness"});
        double smooth = cfg.s;
        rd.get(pot, "smoothness", "potential", smooth);
        try {
            if (const auto c = pot["cosine"]) {
                rd.allow(c, "potential.cosine", {"directions", "amplitude"});
                if (!c["directions"] || !c["amplitude"]) rd.fail(c, "'potential.cosine' needs directions and amplitude");
                cfg.potential = cosine_potential(cfg.lattice, rd.int_vectors(c["directions"], "potential.cosine.directions", d),
                                                 rd.scalar<double>(c["amplitude"], "potential.cosine.amplitude"), smooth);
                cfg.potential_source = "cosine";
            } else if (const auto r = pot["random"]) {
                rd.allow(r, "potential.random", {"seed", "support_radius", "budget"});
                std::uint64_t seed = 1;
                double radius = 2.0, budget = 1.0;
                rd.get(r, "seed", "potential.random", seed);
                rd.get(r, "support_radius", "potential.random", radius);
                rd.get(r, "budget", "potential.random", budget);
                cfg.potential = random_potential(seed, cfg.lattice, radius, smooth, budget);
                cfg.potential_source = "random";
            } else if (const auto f = pot["file"]) {
                std::filesystem::path p = rd.scalar<std::string>(f, "potential.file");
                if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                cfg.potential = load_potential(p.string(), cfg.lattice, smooth);
                cfg.potential_source = p.string();
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError) throw;
            rd.fail(pot, e.what());
        }
    }

    if (const auto c = root["cascade"]) {
        rd.allow(c, "cascade", {"mode", "alpha", "alpha_k", "thresholds", "pool_radius", "series_pool_radius",
                                "block_radius", "shift_radius", "epsilon1", "known_part_order", "constants"});
        if (const auto m = c["mode"]) {
            const auto mode = rd.scalar<std::string>(m, "cascade.mode");
            if (mode == "theory")
                cfg.mode = CascadeMode::Theory;
            else if (mode == "scaled")
                cfg.mode = CascadeMode::Scaled;
            else
                rd.fail(m, "'cascade.mode' must be theory or scaled");
        }
        auto& o = cfg.overrides;
        rd.get(c, "alpha", "cascade", o.alpha);
        if (c["alpha_k"]) o.alpha_k = rd.list<double>(c["alpha_k"], "cascade.alpha_k");
        if (c["thresholds"]) o.thresholds = rd.list<double>(c["thresholds"], "cascade.thresholds");
        rd.get(c, "pool_radius", "cascade", o.pool_radius);
        rd.get(c, "series_pool_radius", "cascade", o.series_pool_radius);
        rd.get(c, "block_radius", "cascade", o.block_radius);
        rd.get(c, "shift_radius", "cascade", o.shift_radius);
        rd.get(c, "epsilon1", "cascade", o.epsilon1);
        rd.get(c, "known_part_order", "cascade", o.known_part_order);
        if (const auto k = c["constants"]) {
            if (!k.IsMap()) rd.fail(k, "'cascade.constants' must be a mapping");
            for (const auto& kv : k)
                cfg.constants[kv.first.as<std::string>()] =
                    rd.scalar<double>(kv.second, "cascade.constants." + kv.first.as<std::string>());
        }
        if (cfg.mode == CascadeMode::Theory && (o.alpha || !o.alpha_k.empty() || !o.thresholds.empty()))
            rd.fail(c, "exponent overrides require cascade.mode: scaled");
    }

    if (const auto e = root["experiment"]) {
        rd.allow(e, "experiment", {"rho", "points", "direction", "indices", "window_radius", "match_window",
                                   "verify_order", "tracked", "resonant"});
        if (e["rho"]) cfg.rho = rd.list<double>(e["rho"], "experiment.rho");
        if (e["points"]) cfg.points = rd.vectors(e["points"], "experiment.points", d);
        if (e["direction"]) {
            const Vec dir = rd.vector(e["direction"], "experiment.direction", d);
            if (!(dir.norm() > 0.0)) rd.fail(e["direction"], "'experiment.direction' must be nonzero");
            cfg.direction = dir.normalized();
        }
        if (e["indices"]) cfg.indices = rd.list<int>(e["indices"], "experiment.indices");
        rd.get(e, "window_radius", "experiment", cfg.window_radius);
        rd.get(e, "match_window", "experiment", cfg.match_window);
        rd.get(e, "verify_order", "experiment", cfg.verify_order);
        if (e["tracked"]) cfg.tracked = rd.int_vectors(e["tracked"], "experiment.tracked", d);
        if (const auto r = e["resonant"]) {
            rd.allow(r, "experiment.resonant", {"directions", "block_radius", "shift_radius"});
            if (r["directions"])
                cfg.resonant.directions = rd.int_vectors(r["directions"], "experiment.resonant.directions", d);
            rd.get(r, "block_radius", "experiment.resonant", cfg.resonant.block_radius);
            rd.get(r, "shift_radius", "experiment.resonant", cfg.resonant.shift_radius);
        }
        for (double r : cfg.rho)
            if (!(r > 1.0)) rd.fail(e["rho"], "'experiment.rho' entries must exceed 1");
    }

    if (const auto sc = root["scan"]) {
        rd.allow(sc, "scan", {"grid", "refined_grid", "bands", "basis_radius", "symmetric", "e_min", "e_max"});
        if (sc["grid"]) cfg.grid = rd.list<int>(sc["grid"], "scan.grid");
        if (sc["refined_grid"]) cfg.refined_grid = rd.list<int>(sc["refined_grid"], "scan.refined_grid");
        if (static_cast<int>(cfg.grid.size()) != d) rd.fail(sc, "'scan.grid' must have one count per dimension");
        if (!cfg.refined_grid.empty() && static_cast<int>(cfg.refined_grid.size()) != d)
            rd.fail(sc["refined_grid"], "'scan.refined_grid' must have one count per dimension");
        rd.get(sc, "bands", "scan", cfg.bands);
        rd.get(sc, "basis_radius", "scan", cfg.basis_radius);
        rd.get(sc, "symmetric", "scan", cfg.symmetric);
        rd.get(sc, "e_min", "scan", cfg.e_min);
        rd.get(sc, "e_max", "scan", cfg.e_max);
    }

    if (const auto sm = root["sampling"]) {
        rd.allow(sm, "sampling", {"samples", "seed", "rays", "ray_directions"});
        rd.get(sm, "samples", "sampling", cfg.samples);
        rd.get(sm, "seed", "sampling", cfg.seed);
        rd.get(sm, "rays", "sampling", cfg.rays);
        if (sm["ray_directions"]) cfg.ray_directions = rd.vectors(sm["ray_directions"], "sampling.ray_directions", d);
    }

    if (const auto run = root["run"]) {
        rd.allow(run, "run", {"workers", "output"});
        rd.get(run, "workers", "run", cfg.workers);
        rd.get(run, "output", "run", cfg.output_dir);
        if (cfg.workers == 0) cfg.workers = 1;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open config file");
    std::ostringstream os;
    os << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(os.str(), path, dir.empty() ? "." : dir.string());
}

}  // namespace polyharm::runner

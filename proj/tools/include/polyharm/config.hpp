#pragma once

#include <polyharm/cascade.hpp>
#include <polyharm/lattice.hpp>
#include <polyharm/potential.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyharm::runner {

/// Block parameters for resonant-check; radii fall back to the cascade.
struct ResonantSpec {
    std::vector<IntCoords> directions;
    std::optional<double> block_radius;
    std::optional<double> shift_radius;
};

struct ExperimentConfig {
    std::string origin;
    std::string text;
    /// FNV-1a of the raw config text, 16 hex digits.
    std::string hash;

    Lattice lattice = Lattice::cubic(2);
    FourierPotential potential;
    std::string potential_source;

    int d = 2;
    int l = 1;
    double s = 45.0;
    CascadeMode mode = CascadeMode::Scaled;
    ScaledOverrides overrides;
    std::map<std::string, double> constants;

    std::vector<double> rho;
    /// Explicit points / centers.
    std::vector<Vec> points;
    /// Unit direction for rho-families; centers are rho * direction.
    std::optional<Vec> direction;
    std::vector<int> indices{0, 1, 2};
    double window_radius = 6.0;
    double match_window = 1.0;
    int verify_order = 2;
    std::vector<IntCoords> tracked;
    ResonantSpec resonant;

    std::vector<int> grid{16, 16};
    std::vector<int> refined_grid;
    int bands = 10;
    double basis_radius = 0.0;
    bool symmetric = false;
    double e_min = 0.0;
    double e_max = 1.0;

    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    int rays = 32;
    std::vector<Vec> ray_directions;

    std::size_t workers = 1;
    std::string output_dir = ".";

    ParameterCascade cascade(double rho) const;
    /// Centers: explicit points, else rho * direction for each rho.
    std::vector<Vec> centers() const;
};

/// Throws Error(ConfigError) with "origin:line:col: message".
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                              const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& text);

}  // namespace polyharm::runner

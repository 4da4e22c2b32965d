#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyharm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Integer coordinates of a lattice vector in the dual basis.
using IntCoords = std::vector<int>;

struct IntCoordsHash {
    std::size_t operator()(const IntCoords& n) const noexcept {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (int c : n) {
            h ^= static_cast<std::size_t>(static_cast<unsigned>(c)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

enum class ErrorCode {
    InvalidArgument,
    SingularBasis,
    PotentialInvalid,
    ConvergenceFailure,
    WindowNotConverged,
    CascadeInequalityViolated,
    ShellViolation,
    SmallDenominator,
    NoCandidate,
    EmptyDirections,
    PhaseDegenerate,
    NoBracket,
    InsufficientBands,
    ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

IntCoords operator+(const IntCoords& a, const IntCoords& b);
IntCoords operator-(const IntCoords& a, const IntCoords& b);
IntCoords operator-(const IntCoords& a);
bool is_zero(const IntCoords& n);
std::string format_coords(const IntCoords& n);

/// |x|^{2l}
double norm_power(const Vec& x, int l);

/// |a|^{2l} - |b|^{2l}, evaluated through (a-b).(a+b) so that nearly equal
/// norms do not cancel catastrophically.
double power_gap(const Vec& a, const Vec& b, int l);

/// r^{2l} - s^{2l} for scalar radii, same factorization.
double radial_power_gap(double r, double s, int l);

}  // namespace polyharm

#include "polyharm/common.hpp"

#include <cmath>
#include <sstream>

namespace polyharm {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SingularBasis: return "SingularBasis";
        case ErrorCode::PotentialInvalid: return "PotentialInvalid";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::WindowNotConverged: return "WindowNotConverged";
        case ErrorCode::CascadeInequalityViolated: return "CascadeInequalityViolated";
        case ErrorCode::ShellViolation: return "ShellViolation";
        case ErrorCode::SmallDenominator: return "SmallDenominator";
        case ErrorCode::NoCandidate: return "NoCandidate";
        case ErrorCode::EmptyDirections: return "EmptyDirections";
        case ErrorCode::PhaseDegenerate: return "PhaseDegenerate";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::InsufficientBands: return "InsufficientBands";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

IntCoords operator+(const IntCoords& a, const IntCoords& b) {
    IntCoords r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

IntCoords operator-(const IntCoords& a, const IntCoords& b) {
    IntCoords r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

IntCoords operator-(const IntCoords& a) {
    IntCoords r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

bool is_zero(const IntCoords& n) {
    for (int c : n)
        if (c != 0) return false;
    return true;
}

std::string format_coords(const IntCoords& n) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
    os << ')';
    return os.str();
}

double norm_power(const Vec& x, int l) { return std::pow(x.squaredNorm(), l); }

namespace {

// sum_{i<l} A^{l-1-i} B^i
double geometric_tail(double A, double B, int l) {
    double sum = 0.0;
    double a_pow = 1.0;
    for (int i = 0; i < l; ++i) {
        sum = sum * B + a_pow;
        a_pow *= A;
    }
    return sum;
}

}  // namespace

double power_gap(const Vec& a, const Vec& b, int l) {
    const double diff2 = (a - b).dot(a + b);
    if (l == 1) return diff2;
    return diff2 * geometric_tail(a.squaredNorm(), b.squaredNorm(), l);
}

double radial_power_gap(double r, double s, int l) {
    const double diff2 = (r - s) * (r + s);
    if (l == 1) return diff2;
    return diff2 * geometric_tail(r * r, s * s, l);
}

}  // namespace polyharm

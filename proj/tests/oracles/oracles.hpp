#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library beyond its plain data types.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;
using Coeffs = std::map<std::vector<int>, Complex>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dual of a 2x2 basis (rows are period vectors) by Cramer's rule on (g_i, w_j) = 2 pi delta_ij.
inline Eigen::Matrix2d dual_2x2(const Eigen::Matrix2d& w) {
    const double det = w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0);
    Eigen::Matrix2d g;
    g(0, 0) = kTwoPi * w(1, 1) / det;
    g(0, 1) = -kTwoPi * w(1, 0) / det;
    g(1, 0) = -kTwoPi * w(0, 1) / det;
    g(1, 1) = kTwoPi * w(0, 0) / det;
    return g;
}

/// Integer points of Z^d in the box [-B, B]^d with 0 < |n|^2 < r^2 (exact integers).
inline std::vector<std::vector<int>> brute_ball_zd(int d, int B, double r, bool exclude_zero) {
    std::vector<std::vector<int>> out;
    std::vector<int> n(static_cast<std::size_t>(d), -B);
    while (true) {
        long long n2 = 0;
        for (int c : n) n2 += static_cast<long long>(c) * c;
        if ((!exclude_zero || n2 != 0) && static_cast<double>(n2) < r * r) out.push_back(n);
        std::size_t i = 0;
        for (; i < n.size(); ++i) {
            if (n[i] < B) {
                ++n[i];
                break;
            }
            n[i] = -B;
        }
        if (i == n.size()) break;
    }
    return out;
}

/// Closed-form eigenvalues of [[a, b], [conj b, c]].
inline std::pair<double, double> eig_2x2(double a, Complex b, double c) {
    const double mean = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
    return {mean - rad, mean + rad};
}

/// Sorted |gamma + t|^{2l} over gamma = G^T n for n in a box.
inline std::vector<double> free_levels(const Eigen::MatrixXd& dual_rows, const Vec& t, int l, int B) {
    const int d = static_cast<int>(dual_rows.rows());
    std::vector<double> out;
    std::vector<int> n(static_cast<std::size_t>(d), -B);
    while (true) {
        Vec g = t;
        for (int i = 0; i < d; ++i) g += n[static_cast<std::size_t>(i)] * dual_rows.row(i).transpose();
        out.push_back(std::pow(g.squaredNorm(), l));
        std::size_t i = 0;
        for (; i < n.size(); ++i) {
            if (n[i] < B) {
                ++n[i];
                break;
            }
            n[i] = -B;
        }
        if (i == n.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Vec embed_zd(const std::vector<int>& n) {
    Vec v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<Eigen::Index>(i)) = n[i];
    return v;
}

/// S_k on Gamma = Z^d by plain enumeration of all k-tuples from the support,
/// with |x|^{2l} evaluated directly.
inline Complex brute_s_k(double a, const Vec& v, int l, const Coeffs& q, int k) {
    std::vector<std::vector<int>> support;
    for (const auto& [n, c] : q) support.push_back(n);
    const std::size_t m = support.size();
    if (m == 0) return 0.0;
    const std::size_t d = support.front().size();
    Complex total = 0.0;
    std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
    while (true) {
        std::vector<int> partial(d, 0);
        Complex num = 1.0;
        double den = 1.0;
        bool ok = true;
        for (int j = 0; j < k && ok; ++j) {
            const auto& g = support[pick[static_cast<std::size_t>(j)]];
            for (std::size_t i = 0; i < d; ++i) partial[i] += g[i];
            if (std::all_of(partial.begin(), partial.end(), [](int c) { return c == 0; })) ok = false;
            num *= q.at(g);
            den *= a - std::pow((v - embed_zd(partial)).squaredNorm(), l);
        }
        if (ok) {
            std::vector<int> closing(d);
            for (std::size_t i = 0; i < d; ++i) closing[i] = -partial[i];
            auto it = q.find(closing);
            if (it != q.end()) total += num * it->second / den;
        }
        std::size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < m) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return total;
}

/// Fixed-point iteration F_s = sum_{k<=s} S_k(|v|^{2l} + F_{s-1}).
inline std::vector<double> brute_known_parts(const Vec& v, int l, const Coeffs& q, int kmax) {
    std::vector<double> F{0.0};
    const double base = std::pow(v.squaredNorm(), l);
    for (int s = 1; s <= kmax; ++s) {
        double sum = 0.0;
        for (int k = 1; k <= s; ++k) sum += brute_s_k(base + F.back(), v, l, q, k).real();
        F.push_back(sum);
    }
    return F;
}

/// Dense plane-wave Hamiltonian on Z^d indices within |n + t - v| <= R, real potential,
/// returning the eigenvalue with the largest weight on index `center` and that weight.
inline std::pair<double, double> dense_tracked(const Vec& t, const Vec& v, int l, const Coeffs& q, double R,
                                               const std::vector<int>& center) {
    const int d = static_cast<int>(t.size());
    std::vector<std::vector<int>> idx;
    const Vec c = v - t;
    const int B = static_cast<int>(std::ceil(R)) + 1;
    std::vector<int> n(static_cast<std::size_t>(d));
    std::function<void(int)> rec = [&](int i) {
        if (i == d) {
            if ((embed_zd(n) - c).norm() <= R) idx.push_back(n);
            return;
        }
        const int mid = static_cast<int>(std::lround(c(i)));
        for (int k = mid - B; k <= mid + B; ++k) {
            n[static_cast<std::size_t>(i)] = k;
            rec(i + 1);
        }
    };
    rec(0);
    const auto N = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    Eigen::Index ci = -1;
    for (Eigen::Index i = 0; i < N; ++i) {
        if (idx[static_cast<std::size_t>(i)] == center) ci = i;
        H(i, i) = std::pow((embed_zd(idx[static_cast<std::size_t>(i)]) + t).squaredNorm(), l);
        for (Eigen::Index j = 0; j < N; ++j) {
            if (i == j) continue;
            std::vector<int> diff(static_cast<std::size_t>(d));
            for (int a = 0; a < d; ++a)
                diff[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] -
                                                    idx[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
            auto it = q.find(diff);
            if (it != q.end()) H(i, j) = it->second.real();
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::Index best = 0;
    es.eigenvectors().row(ci).cwiseAbs2().maxCoeff(&best);
    return {es.eigenvalues()(best), std::pow(es.eigenvectors()(ci, best), 2)};
}

}  // namespace oracle

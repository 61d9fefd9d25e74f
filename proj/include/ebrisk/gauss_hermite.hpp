#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "ebrisk/errors.hpp"
#include "ebrisk/normalize.hpp"

namespace ebrisk {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Eigenvalues and first eigenvector components of a symmetric tridiagonal
// matrix (diagonal d, off-diagonals e), via QL iteration with implicit
// Wilkinson shifts. On return d holds the eigenvalues (unsorted) and z[i]
// the first component of the corresponding unit eigenvector. Only the first
// row of the eigenvector matrix is carried through the rotations, which is
// all a Gaussian quadrature rule needs.
inline void tridiag_eigen_first_row(std::vector<double>& d, std::vector<double>& e,
                                    std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    z.assign(d.size(), 0.0);
    if (n == 0) return;
    z[0] = 1.0;
    if (n == 1) return;

    e.resize(d.size(), 0.0);  // sentinel slot so e[m] with m = n-1 is addressable
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            int m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= kEps * dd) break;
            }
            if (m == l) break;
            if (iter++ == 50) throw Error("hermite_rule: eigenvalue iteration failed to converge");

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {  // rotation underflowed: deflate and retry
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

}  // namespace detail

// Gauss-Hermite rule for integrals of the form  int f(x) exp(-x^2) dx.
// Nodes and weights come from the Golub-Welsch construction: the nodes are
// the eigenvalues of the Jacobi matrix of the orthonormal Hermite recurrence
// (zero diagonal, off-diagonal sqrt(j/2)), and each weight is sqrt(pi) times
// the squared first component of the corresponding unit eigenvector. This is
// robust for every supported node count, unlike Newton iteration from
// asymptotic root guesses, which misconverges once n grows past ~150.
// Exact for polynomials up to degree 2n-1. Nodes are returned in ascending
// order, exactly antisymmetric, with equal weights on paired nodes. The
// extreme weights scale like exp(-2n), so the node count is capped at 350 to
// keep every weight a positive, representable double.
inline QuadratureRule hermite_rule(int n) {
    if (n < 1) throw InvalidSpec("hermite_rule: node count must be >= 1");
    if (n > 350) throw InvalidSpec("hermite_rule: node count exceeds double-precision range (max 350)");

    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j < n; ++j) e.push_back(std::sqrt(0.5 * j));
    std::vector<double> z;
    detail::tridiag_eigen_first_row(d, e, z);

    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    const double sqrt_pi = std::sqrt(std::numbers::pi);
    QuadratureRule rule;
    rule.nodes.resize(d.size());
    rule.weights.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        rule.nodes[i] = d[order[i]];
        rule.weights[i] = sqrt_pi * z[order[i]] * z[order[i]];
    }

    // The integrand weight is even, so the true rule is antisymmetric; fold
    // the +/- pairs together to remove the last-ulp asymmetry the eigenvalue
    // iteration leaves behind.
    const std::size_t half = d.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t j = d.size() - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[half] = 0.0;
    return rule;
}

// Rule for expectations against the standard normal: E[f(Z)] ~= sum_i w_i f(x_i)
// with Z ~ N(0,1). Substitutes x = sqrt(2) z into the Hermite rule and
// normalises the weights so their plain left-to-right sum is exactly 1,
// pinning the few-ulp division residual on the central (largest) weight.
// For odd n the central node is 0, so the adjustment cannot disturb
// odd-moment antisymmetry.
inline QuadratureRule normal_rule(int n) {
    QuadratureRule rule = hermite_rule(n);
    double total = 0.0;
    for (double w : rule.weights) total += w;
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] *= sqrt2;
        rule.weights[i] /= total;
    }
    // Candidate slots for the residual stay within |z| <~ 4.5 (central node
    // spacing is ~pi*sqrt(2)/sqrt(2n)), so a few-ulp nudge cannot disturb
    // moments up to degree ~10 beyond 1e-12 relative.
    const auto max_offset = static_cast<std::ptrdiff_t>(std::sqrt(2.0 * n));
    detail::pin_unit_sum(rule.weights, rule.weights.size() / 2, std::max<std::ptrdiff_t>(3, max_offset));
    return rule;
}

}  // namespace ebrisk

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ebrisk/normalize.hpp"

#include "ebrisk/errors.hpp"

namespace ebrisk {

// Weight vectors must sum to one within this tolerance at construction.
inline constexpr double kWeightSumTol = 1e-12;

namespace detail {

inline double std_normal_cdf(double t) {
    return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

inline double std_normal_survival(double t) {
    return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

// Shared canonicalisation: sort components by key, merge exact duplicates,
// drop zero weights, validate the weight sum and rescale it to exactly one.
template <class Key>
inline void canonicalize_components(std::vector<Key>& keys, std::vector<double>& weights,
                                    const char* what) {
    if (keys.size() != weights.size())
        throw InvalidPrior(std::string(what) + ": weights and component lists differ in length");
    if (keys.empty()) throw InvalidPrior(std::string(what) + ": no components");
    for (double w : weights) {
        if (!std::isfinite(w)) throw InvalidPrior(std::string(what) + ": weights must be finite");
        if (w < 0.0) throw InvalidPrior(std::string(what) + ": weights must be nonnegative");
    }

    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    std::vector<Key> k2;
    std::vector<double> w2;
    k2.reserve(keys.size());
    w2.reserve(keys.size());
    for (std::size_t idx : order) {
        if (weights[idx] == 0.0) continue;
        if (!k2.empty() && k2.back() == keys[idx]) {
            w2.back() += weights[idx];
        } else {
            k2.push_back(keys[idx]);
            w2.push_back(weights[idx]);
        }
    }
    if (k2.empty()) throw InvalidPrior(std::string(what) + ": all weights are zero");

    double total = 0.0;
    for (double w : w2) total += w;
    if (std::abs(total - 1.0) > kWeightSumTol)
        throw InvalidPrior(std::string(what) + ": weights must sum to 1 (got " +
                           std::to_string(total) + ")");
    for (double& w : w2) w /= total;
    // Division rounds each weight separately; pin the few-ulp residual on the
    // largest weight so the plain left-to-right sum -- the one cdf and
    // expectation loops observe -- is exactly 1.
    detail::pin_unit_sum(
        w2, static_cast<std::size_t>(std::max_element(w2.begin(), w2.end()) - w2.begin()),
        static_cast<std::ptrdiff_t>(w2.size()));

    keys = std::move(k2);
    weights = std::move(w2);
}

}  // namespace detail

// ============================================================================
// Prior families
// ============================================================================

// Finitely supported prior. Canonical form: atoms strictly increasing,
// weights strictly positive and summing to one; duplicates merged and zero
// weights pruned at construction. Immutable afterwards.
class DiscretePrior {
public:
    DiscretePrior(std::vector<double> atoms, std::vector<double> weights)
        : atoms_(std::move(atoms)), weights_(std::move(weights)) {
        for (double a : atoms_)
            if (!std::isfinite(a)) throw InvalidPrior("atoms: values must be finite");
        detail::canonicalize_components(atoms_, weights_, "atoms");
    }

    static DiscretePrior point_mass(double location) { return {{location}, {1.0}}; }

    // Half the mass at -magnitude, half at +magnitude.
    static DiscretePrior rademacher(double magnitude = 1.0) {
        if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
            throw InvalidPrior("rademacher: magnitude must be a nonnegative real");
        return {{-magnitude, magnitude}, {0.5, 0.5}};
    }

    const std::vector<double>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    friend bool operator==(const DiscretePrior&, const DiscretePrior&) = default;

private:
    std::vector<double> atoms_;
    std::vector<double> weights_;
};

// Mixture of Gaussians, closed under convolution with the Gaussian
// likelihood. Components sorted by (mean, variance); exact duplicates merged.
class GaussianMixturePrior {
public:
    GaussianMixturePrior(std::vector<double> means, std::vector<double> variances,
                         std::vector<double> weights) {
        if (means.size() != variances.size())
            throw InvalidPrior("variances: length must match means");
        for (double m : means)
            if (!std::isfinite(m)) throw InvalidPrior("means: values must be finite");
        for (double v : variances)
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidPrior("variances: values must be positive finite reals");

        std::vector<std::pair<double, double>> comps(means.size());
        for (std::size_t i = 0; i < means.size(); ++i) comps[i] = {means[i], variances[i]};
        detail::canonicalize_components(comps, weights, "components");

        means_.resize(comps.size());
        variances_.resize(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i) {
            means_[i] = comps[i].first;
            variances_[i] = comps[i].second;
        }
        weights_ = std::move(weights);
    }

    static GaussianMixturePrior gaussian(double mean, double variance) {
        return {{mean}, {variance}, {1.0}};
    }

    const std::vector<double>& means() const noexcept { return means_; }
    const std::vector<double>& variances() const noexcept { return variances_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return means_.size(); }

    friend bool operator==(const GaussianMixturePrior&, const GaussianMixturePrior&) = default;

private:
    std::vector<double> means_;
    std::vector<double> variances_;
    std::vector<double> weights_;
};

using Prior = std::variant<DiscretePrior, GaussianMixturePrior>;

// Polynomial tail certificate: max(1 - G(s), G(-s)) <= c * s^(-k) for all s > 0.
struct TailCondition {
    double k;
    double c;

    TailCondition(double k_, double c_) : k(k_), c(c_) {
        if (!(k > 2.0) || !std::isfinite(k))
            throw InvalidSpec("tail_k: exponent must be a finite real > 2");
        if (!(c > 0.0) || !std::isfinite(c))
            throw InvalidSpec("tail_c: constant must be a positive finite real");
    }
};

// ============================================================================
// Moments and distribution functions
// ============================================================================

inline double mean(const DiscretePrior& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m += g.weights()[i] * g.atoms()[i];
    return m;
}

inline double mean(const GaussianMixturePrior& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m += g.weights()[i] * g.means()[i];
    return m;
}

inline double mean(const Prior& g) {
    return std::visit([](const auto& p) { return mean(p); }, g);
}

inline double second_moment(const DiscretePrior& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        m += g.weights()[i] * g.atoms()[i] * g.atoms()[i];
    return m;
}

inline double second_moment(const GaussianMixturePrior& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        m += g.weights()[i] * (g.means()[i] * g.means()[i] + g.variances()[i]);
    return m;
}

inline double second_moment(const Prior& g) {
    return std::visit([](const auto& p) { return second_moment(p); }, g);
}

template <class PriorT>
inline double variance(const PriorT& g) {
    const double mu = mean(g);
    return std::max(0.0, second_moment(g) - mu * mu);
}

// P(theta <= s); right-continuous, so an atom exactly at s is included.
inline double cdf(const DiscretePrior& g, double s) {
    double p = 0.0;
    for (std::size_t i = 0; i < g.size() && g.atoms()[i] <= s; ++i) p += g.weights()[i];
    return p;
}

inline double cdf(const GaussianMixturePrior& g, double s) {
    double p = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        p += g.weights()[i] * detail::std_normal_cdf((s - g.means()[i]) / std::sqrt(g.variances()[i]));
    return p;
}

inline double cdf(const Prior& g, double s) {
    return std::visit([&](const auto& p) { return cdf(p, s); }, g);
}

// max(P(theta > s), P(theta <= -s)), the two-sided tail at s. Both sides are
// computed as direct survival sums so that deep tails keep full precision.
inline double tail_max(const DiscretePrior& g, double s) {
    double right = 0.0;
    double left = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.atoms()[i] > s) right += g.weights()[i];
        if (g.atoms()[i] <= -s) left += g.weights()[i];
    }
    return std::max(right, left);
}

inline double tail_max(const GaussianMixturePrior& g, double s) {
    double right = 0.0;
    double left = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double sd = std::sqrt(g.variances()[i]);
        right += g.weights()[i] * detail::std_normal_survival((s - g.means()[i]) / sd);
        left += g.weights()[i] * detail::std_normal_cdf((-s - g.means()[i]) / sd);
    }
    return std::max(right, left);
}

inline double tail_max(const Prior& g, double s) {
    return std::visit([&](const auto& p) { return tail_max(p, s); }, g);
}

// ============================================================================
// Tail constants
// ============================================================================

namespace detail {

// sup over s of s^k * tail(s), seeded by an ascending grid and sharpened by
// repeated log-space zooming around the best point. Throws NonIntegrableTail
// when the maximum sits on the upper edge and is still climbing there.
template <class TailFn>
inline double sup_power_tail(TailFn&& tail, double k, const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidSpec("s grid must be nonempty");
    const std::size_t n = grid.size();
    std::vector<double> vals(n);
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
        vals[i] = std::pow(grid[i], k) * tail(grid[i]);
        if (vals[i] > best) {
            best = vals[i];
            best_i = i;
        }
    }

    if (best_i + 1 >= n && n >= 6) {
        bool climbing = true;
        for (std::size_t j = n - 5; j < n; ++j)
            if (!(vals[j] > vals[j - 1])) {
                climbing = false;
                break;
            }
        if (climbing)
            throw NonIntegrableTail("tail_constant: s^k * tail keeps growing along the grid");
    }

    double lo = grid[best_i == 0 ? 0 : best_i - 1];
    double hi = grid[std::min(best_i + 1, n - 1)];
    constexpr int kPoints = 33;
    for (int round = 0; round < 12 && hi > lo; ++round) {
        const double llo = std::log(lo);
        const double lhi = std::log(hi);
        int bj = 0;
        double bb = -1.0;
        for (int j = 0; j < kPoints; ++j) {
            const double s = std::exp(llo + (lhi - llo) * j / (kPoints - 1));
            const double v = std::pow(s, k) * tail(s);
            if (v > bb) {
                bb = v;
                bj = j;
            }
        }
        best = std::max(best, bb);
        lo = std::exp(llo + (lhi - llo) * std::max(0, bj - 1) / (kPoints - 1));
        hi = std::exp(llo + (lhi - llo) * std::min(kPoints - 1, bj + 1) / (kPoints - 1));
    }
    return best;
}

inline void require_tail_exponent(double k) {
    if (!(k > 2.0) || !std::isfinite(k))
        throw InvalidSpec("tail exponent k must be a finite real > 2");
}

}  // namespace detail

// Default evaluation grid for tail checks: 1024 log-spaced points spanning
// [max(1e-6, 1e-3 * smallest scale), 1e3 * largest scale] of the prior. For
// discrete priors the atom magnitudes, and points just below them, are
// appended, since s^k * tail(s) peaks at the jump points of a step tail.
inline std::vector<double> default_s_grid(const DiscretePrior& g) {
    std::vector<double> mags;
    for (double a : g.atoms())
        if (a != 0.0) mags.push_back(std::abs(a));
    double lo = 1e-6;
    double hi = 1e3;
    if (!mags.empty()) {
        const auto [mn, mx] = std::minmax_element(mags.begin(), mags.end());
        lo = std::max(1e-6, 1e-3 * *mn);
        hi = 1e3 * *mx;
    }
    std::vector<double> grid;
    grid.reserve(1024 + 2 * mags.size());
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < 1024; ++i) grid.push_back(std::exp(llo + (lhi - llo) * i / 1023.0));
    for (double m : mags) {
        grid.push_back(m);
        grid.push_back(m * (1.0 - 1e-6));
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

inline std::vector<double> default_s_grid(const GaussianMixturePrior& g) {
    double scale_lo = std::numeric_limits<double>::infinity();
    double scale_hi = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double sd = std::sqrt(g.variances()[i]);
        scale_lo = std::min(scale_lo, std::max(std::abs(g.means()[i]), sd));
        scale_hi = std::max(scale_hi, std::abs(g.means()[i]) + 6.0 * sd);
    }
    const double lo = std::max(1e-6, 1e-3 * scale_lo);
    const double hi = 1e3 * scale_hi;
    std::vector<double> grid(1024);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < 1024; ++i) grid[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / 1023.0);
    return grid;
}

inline std::vector<double> default_s_grid(const Prior& g) {
    return std::visit([](const auto& p) { return default_s_grid(p); }, g);
}

// Smallest c with max(1 - G(s), G(-s)) <= c * s^(-k) for all s > 0.
//
// For a discrete prior the supremum of s^k * tail(s) is approached at atom
// magnitudes: on each flat stretch of the step tail, s^k grows toward the
// next jump, so sup = max over magnitudes a of a^k * max(P(theta >= a),
// P(theta <= -a)), evaluated here exactly.
inline double tail_constant(const DiscretePrior& g, double k) {
    detail::require_tail_exponent(k);
    double best = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = std::abs(g.atoms()[i]);
        if (a == 0.0) continue;
        double right = 0.0;
        double left = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g.atoms()[j] >= a) right += g.weights()[j];
            if (g.atoms()[j] <= -a) left += g.weights()[j];
        }
        best = std::max(best, std::pow(a, k) * std::max(right, left));
    }
    return best;
}

inline double tail_constant(const GaussianMixturePrior& g, double k) {
    detail::require_tail_exponent(k);
    return detail::sup_power_tail([&](double s) { return tail_max(g, s); }, k, default_s_grid(g));
}

inline double tail_constant(const Prior& g, double k) {
    return std::visit([&](const auto& p) { return tail_constant(p, k); }, g);
}

}  // namespace ebrisk

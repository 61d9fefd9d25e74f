#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "ebrisk/errors.hpp"
#include "ebrisk/prior.hpp"

namespace ebrisk {

namespace detail {

inline void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidSigma("sigma: must be a positive finite real");
}

inline double log_normal_pdf(double resid, double var) {
    return -0.5 * resid * resid / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

// Posterior component weights lambda_i(x) together with log f(x). All sums
// are max-shifted so the weights stay exact even when every component log
// density underflows (small sigma, far-out x).
struct PosteriorWeights {
    std::vector<double> lambda;  // sums to 1
    double log_marginal;
};

inline PosteriorWeights posterior_weights(const DiscretePrior& g, double sigma, double x) {
    const double var = sigma * sigma;
    std::vector<double> logs(g.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        logs[i] = std::log(g.weights()[i]) + log_normal_pdf(x - g.atoms()[i], var);
        if (logs[i] > mx) mx = logs[i];
    }
    PosteriorWeights out;
    out.lambda.resize(g.size());
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.lambda[i] = std::exp(logs[i] - mx);
        total += out.lambda[i];
    }
    for (double& l : out.lambda) l /= total;
    out.log_marginal = mx + std::log(total);
    return out;
}

inline PosteriorWeights posterior_weights(const GaussianMixturePrior& g, double sigma, double x) {
    const double var = sigma * sigma;
    std::vector<double> logs(g.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        logs[i] = std::log(g.weights()[i]) + log_normal_pdf(x - g.means()[i], var + g.variances()[i]);
        if (logs[i] > mx) mx = logs[i];
    }
    PosteriorWeights out;
    out.lambda.resize(g.size());
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.lambda[i] = std::exp(logs[i] - mx);
        total += out.lambda[i];
    }
    for (double& l : out.lambda) l /= total;
    out.log_marginal = mx + std::log(total);
    return out;
}

}  // namespace detail

// ============================================================================
// Marginal density
// ============================================================================

// log of the marginal density f(x) of X = theta + sigma * Z, theta ~ G.
inline double log_marginal_density(const DiscretePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    return detail::posterior_weights(g, sigma, x).log_marginal;
}

inline double log_marginal_density(const GaussianMixturePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    return detail::posterior_weights(g, sigma, x).log_marginal;
}

inline double log_marginal_density(const Prior& g, double sigma, double x) {
    return std::visit([&](const auto& p) { return log_marginal_density(p, sigma, x); }, g);
}

inline double marginal_density(const Prior& g, double sigma, double x) {
    return std::exp(log_marginal_density(g, sigma, x));
}

// d/dx log f(x), evaluated through the differentiated convolution kernel:
// f'(x) is the mixture sum with each component multiplied by its own
// (center - x) / component variance. Deliberately a separate summation route
// from posterior_mean, so the two can cross-check each other.
inline double marginal_score(const DiscretePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    const double var = sigma * sigma;
    double score = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        score += w.lambda[i] * (g.atoms()[i] - x) / var;
    return score;
}

inline double marginal_score(const GaussianMixturePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    const double var = sigma * sigma;
    double score = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        score += w.lambda[i] * (g.means()[i] - x) / (var + g.variances()[i]);
    return score;
}

inline double marginal_score(const Prior& g, double sigma, double x) {
    return std::visit([&](const auto& p) { return marginal_score(p, sigma, x); }, g);
}

// ============================================================================
// Posterior functionals
// ============================================================================

// E[theta | X = x] under prior g and noise level sigma.
inline double posterior_mean(const DiscretePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m += w.lambda[i] * g.atoms()[i];
    return m;
}

inline double posterior_mean(const GaussianMixturePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    const double var = sigma * sigma;
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s2 = var + g.variances()[i];
        m += w.lambda[i] * (g.variances()[i] * x + var * g.means()[i]) / s2;
    }
    return m;
}

inline double posterior_mean(const Prior& g, double sigma, double x) {
    return std::visit([&](const auto& p) { return posterior_mean(p, sigma, x); }, g);
}

// The same posterior mean reached through the score identity
// E[theta | x] = x + sigma^2 * (d/dx log f)(x). Kept as a distinct code path
// so tests can compare it against the direct mixture formula.
template <class PriorT>
inline double posterior_mean_tweedie(const PriorT& g, double sigma, double x) {
    return x + sigma * sigma * marginal_score(g, sigma, x);
}

// E[theta^2 | X = x].
inline double posterior_second_moment(const DiscretePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        m += w.lambda[i] * g.atoms()[i] * g.atoms()[i];
    return m;
}

inline double posterior_second_moment(const GaussianMixturePrior& g, double sigma, double x) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    const double var = sigma * sigma;
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s2 = var + g.variances()[i];
        const double mi = (g.variances()[i] * x + var * g.means()[i]) / s2;
        const double vi = g.variances()[i] * var / s2;
        m += w.lambda[i] * (mi * mi + vi);
    }
    return m;
}

inline double posterior_second_moment(const Prior& g, double sigma, double x) {
    return std::visit([&](const auto& p) { return posterior_second_moment(p, sigma, x); }, g);
}

inline double posterior_variance(const Prior& g, double sigma, double x) {
    const double pm = posterior_mean(g, sigma, x);
    return std::max(0.0, posterior_second_moment(g, sigma, x) - pm * pm);
}

// P(theta > t | X = x); strict inequality, matching the complement of the
// right-continuous prior CDF.
inline double posterior_tail(const DiscretePrior& g, double sigma, double x, double s) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    double p = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.atoms()[i] > s) p += w.lambda[i];
    return p;
}

inline double posterior_tail(const GaussianMixturePrior& g, double sigma, double x, double s) {
    detail::require_sigma(sigma);
    const auto w = detail::posterior_weights(g, sigma, x);
    const double var = sigma * sigma;
    double p = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s2 = var + g.variances()[i];
        const double mi = (g.variances()[i] * x + var * g.means()[i]) / s2;
        const double vi = g.variances()[i] * var / s2;
        p += w.lambda[i] * detail::std_normal_survival((s - mi) / std::sqrt(vi));
    }
    return p;
}

inline double posterior_tail(const Prior& g, double sigma, double x, double s) {
    return std::visit([&](const auto& p) { return posterior_tail(p, sigma, x, s); }, g);
}

}  // namespace ebrisk

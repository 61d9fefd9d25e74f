#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <optional>
#include <string>

#include "ebrisk/errors.hpp"
#include "ebrisk/gauss_hermite.hpp"
#include "ebrisk/posterior.hpp"
#include "ebrisk/prior.hpp"
#include "ebrisk/random.hpp"

namespace ebrisk {

// ============================================================================
// Configuration and report types
// ============================================================================

struct QuadratureSpec {
    int gh_nodes = 121;            // Gauss-Hermite nodes for the noise integral
    std::size_t mc_samples = 200000;
    std::uint64_t seed = 0;
    int theta_nodes = 61;          // outer nodes per Gaussian-mixture component

    void validate() const {
        if (gh_nodes < 3) throw InvalidSpec("gh_nodes: must be >= 3");
        if (mc_samples < 100) throw InvalidSpec("mc_samples: must be >= 100");
        if (theta_nodes < 1) throw InvalidSpec("theta_nodes: must be >= 1");
    }
};

enum class Method { quadrature, monte_carlo };

inline const char* to_string(Method m) {
    return m == Method::quadrature ? "quadrature" : "monte_carlo";
}

// One evaluation of the disagreement risk
//   R = E_{theta ~ g0, X ~ N(theta, sigma^2)} [ (E_{g1}[theta | X] - theta)^2 ]
// together with the second-moment functional M = E[ E_{g1}[theta | X]^2 ].
struct RiskReport {
    double risk = 0.0;
    double second_moment = 0.0;
    Method method = Method::quadrature;
    std::optional<double> std_error;  // absent for quadrature
    double sigma = 0.0;
    std::int64_t n_evals = 0;
};

// ============================================================================
// Quadrature path
// ============================================================================

namespace detail {

// Inner expectation over X = theta + sigma * Z at a fixed truth theta:
// adds w_outer * E_Z[(pm(X) - theta)^2] to R and w_outer * E_Z[pm(X)^2] to M.
template <class PriorT>
inline void accumulate_truth(const PriorT& g1, double sigma, double theta, double w_outer,
                             const QuadratureRule& zrule, CompensatedSum& r_acc,
                             CompensatedSum& m_acc, std::int64_t& n_evals) {
    for (std::size_t i = 0; i < zrule.nodes.size(); ++i) {
        const double x = theta + sigma * zrule.nodes[i];
        const double pm = posterior_mean(g1, sigma, x);
        const double w = w_outer * zrule.weights[i];
        r_acc.add(w * (pm - theta) * (pm - theta));
        m_acc.add(w * pm * pm);
        ++n_evals;
    }
}

}  // namespace detail

inline RiskReport risk_quadrature(const Prior& g0, const Prior& g1, double sigma,
                                  const QuadratureSpec& spec = {}) {
    detail::require_sigma(sigma);
    spec.validate();
    const QuadratureRule zrule = normal_rule(spec.gh_nodes);

    CompensatedSum r_acc;
    CompensatedSum m_acc;
    std::int64_t n_evals = 0;

    const auto over_g1 = [&](const auto& g1c) {
        if (const auto* d = std::get_if<DiscretePrior>(&g0)) {
            // theta ranges over the atoms: the outer integral is an exact sum.
            for (std::size_t j = 0; j < d->size(); ++j)
                detail::accumulate_truth(g1c, sigma, d->atoms()[j], d->weights()[j], zrule,
                                         r_acc, m_acc, n_evals);
        } else {
            // theta ~ N(mu_j, tau_j^2) per component: outer Gauss-Hermite in
            // theta tensored with the inner rule in the noise variable.
            const auto& gm = std::get<GaussianMixturePrior>(g0);
            const QuadratureRule trule = normal_rule(spec.theta_nodes);
            for (std::size_t j = 0; j < gm.size(); ++j) {
                const double tau = std::sqrt(gm.variances()[j]);
                for (std::size_t t = 0; t < trule.nodes.size(); ++t) {
                    const double theta = gm.means()[j] + tau * trule.nodes[t];
                    detail::accumulate_truth(g1c, sigma, theta,
                                             gm.weights()[j] * trule.weights[t], zrule, r_acc,
                                             m_acc, n_evals);
                }
            }
        }
    };
    std::visit(over_g1, g1);

    RiskReport rep;
    rep.risk = std::max(0.0, r_acc.value());
    rep.second_moment = std::max(0.0, m_acc.value());
    rep.method = Method::quadrature;
    rep.sigma = sigma;
    rep.n_evals = n_evals;
    return rep;
}

inline double second_moment_functional(const Prior& g0, const Prior& g1, double sigma,
                                       const QuadratureSpec& spec = {}) {
    return risk_quadrature(g0, g1, sigma, spec).second_moment;
}

// ============================================================================
// Monte Carlo path
// ============================================================================

inline RiskReport risk_monte_carlo(const Prior& g0, const Prior& g1, double sigma,
                                   const QuadratureSpec& spec = {}) {
    detail::require_sigma(sigma);
    spec.validate();
    const std::size_t n = spec.mc_samples;

    CompensatedSum loss_sum;    // (pm - theta)^2
    CompensatedSum loss_sq_sum; // squared, for the standard error
    CompensatedSum m_sum;       // pm^2

    const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        std::mt19937_64 gen(derive_seed(spec.seed, c));
        const std::size_t end = std::min(n, (c + 1) * kChunkSize);
        for (std::size_t i = c * kChunkSize; i < end; ++i) {
            const double theta = sample_theta(g0, gen);
            const double x = theta + sigma * normal(gen);
            const double pm = posterior_mean(g1, sigma, x);
            const double loss = (pm - theta) * (pm - theta);
            loss_sum.add(loss);
            loss_sq_sum.add(loss * loss);
            m_sum.add(pm * pm);
        }
    }

    const double nd = static_cast<double>(n);
    const double mean_loss = loss_sum.value() / nd;
    const double var_loss =
        std::max(0.0, (loss_sq_sum.value() - nd * mean_loss * mean_loss) / (nd - 1.0));

    RiskReport rep;
    rep.risk = mean_loss;
    rep.second_moment = m_sum.value() / nd;
    rep.method = Method::monte_carlo;
    rep.std_error = std::sqrt(var_loss / nd);
    rep.sigma = sigma;
    rep.n_evals = static_cast<std::int64_t>(n);
    return rep;
}

// Coarse risk majorant from the second-moment functional:
// (a - b)^2 <= 2a^2 + 2b^2, so R <= 2 * E theta^2 + 2 M <= 2 v + 2 m with v
// the larger prior variance (means are zero in that regime).
inline double risk_upper_from_moment(double m, double v) { return 2.0 * v + 2.0 * m; }

}  // namespace ebrisk

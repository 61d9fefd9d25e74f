#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ebrisk/bounds.hpp"
#include "ebrisk/errors.hpp"
#include "ebrisk/prior.hpp"
#include "ebrisk/random.hpp"
#include "ebrisk/risk.hpp"

namespace ebrisk {

// ============================================================================
// Sweeps
// ============================================================================

inline std::vector<RiskReport> sweep_sigma(const Prior& g0, const Prior& g1,
                                           const std::vector<double>& sigma_grid,
                                           const QuadratureSpec& spec = {}) {
    if (sigma_grid.empty()) throw InvalidSpec("sigma_grid: must be nonempty");
    std::vector<RiskReport> out;
    out.reserve(sigma_grid.size());
    for (double s : sigma_grid) out.push_back(risk_quadrature(g0, g1, s, spec));
    return out;
}

// ============================================================================
// Moment projection
// ============================================================================

// Push a discrete prior into the feasible set {mean 0, variance <= var_cap}:
// recenter the atoms, then shrink them toward 0 if the variance cap binds.
// Weights are untouched.
inline DiscretePrior project_moments(const DiscretePrior& prior, double var_cap) {
    if (!(var_cap > 0.0) || !std::isfinite(var_cap))
        throw InvalidSpec("var_cap: must be a positive finite real");
    if (prior.size() < 2)
        throw DegeneratePrior("project_moments: needs at least 2 distinct atoms");

    std::vector<double> atoms = prior.atoms();
    const std::vector<double>& w = prior.weights();

    // Two centering passes: the second removes the rounding residue of the
    // first, keeping |mean| at the 1e-17 scale rather than 1e-13.
    for (int pass = 0; pass < 2; ++pass) {
        double m = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) m += w[i] * atoms[i];
        for (double& a : atoms) a -= m;
    }

    double var = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) var += w[i] * atoms[i] * atoms[i];
    if (var > var_cap) {
        const double scale = std::sqrt(var_cap / var);
        for (double& a : atoms) a *= scale;
    }
    return DiscretePrior(std::move(atoms), w);
}

// ============================================================================
// Risk maximization over constrained discrete priors
// ============================================================================

struct SearchConfig {
    int n_atoms_g0 = 2;
    int n_atoms_g1 = 2;
    double var_cap = 1.0;
    std::vector<double> sigma_grid;
    int restarts = 4;
    int iters = 40;
    std::uint64_t seed = 0;
    std::optional<double> tail_k;  // if set, g1 must satisfy the tail condition
    std::optional<double> tail_c;

    void validate() const {
        if (n_atoms_g0 < 1 || n_atoms_g1 < 1)
            throw InfeasibleConfig("n_atoms: each prior needs at least 1 atom");
        if (!(var_cap > 0.0) || !std::isfinite(var_cap))
            throw InvalidSpec("var_cap: must be a positive finite real");
        if (sigma_grid.empty()) throw InvalidSpec("sigma_grid: must be nonempty");
        if (!std::is_sorted(sigma_grid.begin(), sigma_grid.end()))
            throw InvalidSpec("sigma_grid: must be sorted ascending");
        for (double s : sigma_grid)
            if (!(s > 0.0) || !std::isfinite(s))
                throw InvalidSpec("sigma_grid: entries must be positive finite reals");
        if (restarts < 1) throw InvalidSpec("restarts: must be >= 1");
        if (iters < 1) throw InvalidSpec("iters: must be >= 1");
        if (tail_k.has_value() != tail_c.has_value())
            throw InvalidSpec("tail_k and tail_c must be given together");
        if (tail_k) (void)TailCondition(*tail_k, *tail_c);  // range checks
    }
};

struct TracePoint {
    std::int64_t iteration;
    double risk;
};

struct SearchResult {
    DiscretePrior best_g0 = DiscretePrior::point_mass(0.0);
    DiscretePrior best_g1 = DiscretePrior::point_mass(0.0);
    double best_sigma = 1.0;
    double best_risk = 0.0;
    std::vector<TracePoint> trace;
};

namespace detail {

// Raw search coordinates for one prior: atom locations plus weight logits.
// A single-atom prior is pinned to the point mass at 0 (the only mean-zero
// choice) and exposes no coordinates.
struct RawPrior {
    std::vector<double> atoms;
    std::vector<double> logits;

    bool pinned() const { return atoms.size() < 2; }
};

// Materialize: softmax the logits, canonicalize, project onto the moment
// constraints. Degenerate proposals (all atoms merging) return nullopt.
inline std::optional<DiscretePrior> realize(const RawPrior& raw, double var_cap) {
    if (raw.pinned()) return DiscretePrior::point_mass(0.0);
    double mx = *std::max_element(raw.logits.begin(), raw.logits.end());
    std::vector<double> w(raw.logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(raw.logits[i] - mx);
        total += w[i];
    }
    for (double& x : w) x /= total;
    try {
        return project_moments(DiscretePrior(raw.atoms, std::move(w)), var_cap);
    } catch (const DegeneratePrior&) {
        return std::nullopt;
    }
}

struct Evaluated {
    DiscretePrior g0;
    DiscretePrior g1;
    double sigma;
    double risk;
};

}  // namespace detail

// Derivative-free maximization of the quadrature risk over pairs of discrete
// priors with mean 0 and variance <= var_cap (g1 optionally tail-constrained).
// Warm starts: the symmetric two-point prior at the variance cap, and a
// three-atom spike-and-slab surrogate; remaining restarts are random.
// Coordinate-wise perturbations with geometric step decay; sigma by grid
// argmax; fully deterministic for a fixed config.
inline SearchResult maximize_risk(const SearchConfig& config, const QuadratureSpec& spec = {}) {
    config.validate();
    spec.validate();
    const double cap = config.var_cap;
    const double span = 3.0 * std::sqrt(cap);

    const auto tail_ok = [&](const DiscretePrior& g1) {
        if (!config.tail_k) return true;
        return tail_constant(g1, *config.tail_k) <= *config.tail_c;
    };

    // Evaluate a raw candidate pair; nullopt when degenerate or infeasible.
    const auto evaluate = [&](const detail::RawPrior& r0,
                              const detail::RawPrior& r1) -> std::optional<detail::Evaluated> {
        auto g0 = detail::realize(r0, cap);
        auto g1 = detail::realize(r1, cap);
        if (!g0 || !g1) return std::nullopt;
        if (!tail_ok(*g1)) return std::nullopt;
        double best_risk = -1.0;
        double best_sigma = config.sigma_grid.front();
        for (double s : config.sigma_grid) {
            const double r = risk_quadrature(*g0, *g1, s, spec).risk;
            if (r > best_risk) {
                best_risk = r;
                best_sigma = s;
            }
        }
        return detail::Evaluated{std::move(*g0), std::move(*g1), best_sigma, best_risk};
    };

    // --- initial raw candidates per restart ---------------------------------
    const auto rademacher_raw = [&](int n_atoms) {
        detail::RawPrior r;
        if (n_atoms < 2) return r.atoms = {0.0}, r.logits = {0.0}, r;
        const double m = std::sqrt(cap);
        r.atoms = {-m, m};
        r.logits = {0.0, 0.0};
        for (int i = 2; i < n_atoms; ++i) {
            // Park spare atoms near 0 with negligible weight; the search can
            // recruit them later by raising their logits.
            r.atoms.push_back(0.25 * m * (i - 1));
            r.logits.push_back(-30.0);
        }
        return r;
    };
    const auto heavy_tail_raw = [&](int n_atoms) {
        if (n_atoms < 3) return rademacher_raw(n_atoms);
        constexpr double eps = 0.05;
        const double a = std::sqrt(cap / (2.0 * eps));
        detail::RawPrior r;
        r.atoms = {-a, 0.0, a};
        r.logits = {std::log(eps), std::log(1.0 - 2.0 * eps), std::log(eps)};
        for (int i = 3; i < n_atoms; ++i) {
            r.atoms.push_back(0.4 * a * (i - 2));
            r.logits.push_back(-30.0);
        }
        return r;
    };
    const auto random_raw = [&](int n_atoms, std::mt19937_64& gen) {
        detail::RawPrior r;
        if (n_atoms < 2) return r.atoms = {0.0}, r.logits = {0.0}, r;
        r.atoms.resize(static_cast<std::size_t>(n_atoms));
        r.logits.resize(static_cast<std::size_t>(n_atoms));
        for (int i = 0; i < n_atoms; ++i) {
            r.atoms[static_cast<std::size_t>(i)] = span * (2.0 * uniform01(gen) - 1.0);
            // -log U is Exp(1); normalized exponentials are Dirichlet(1).
            r.logits[static_cast<std::size_t>(i)] =
                std::log(-std::log(std::max(uniform01(gen), 0x1.0p-53)));
        }
        return r;
    };

    SearchResult result;
    bool have_best = false;
    std::int64_t tick = 0;

    const auto consider = [&](const std::optional<detail::Evaluated>& ev) {
        ++tick;
        if (!ev) return;
        if (!have_best || ev->risk > result.best_risk) {
            result.best_g0 = ev->g0;
            result.best_g1 = ev->g1;
            result.best_sigma = ev->sigma;
            result.best_risk = ev->risk;
            result.trace.push_back({tick - 1, ev->risk});
            have_best = true;
        }
    };

    for (int restart = 0; restart < config.restarts; ++restart) {
        std::mt19937_64 gen(derive_seed(config.seed, static_cast<std::uint64_t>(restart)));

        detail::RawPrior r0, r1;
        if (restart == 0) {
            r0 = rademacher_raw(config.n_atoms_g0);
            r1 = rademacher_raw(config.n_atoms_g1);
        } else if (restart == 1) {
            r0 = heavy_tail_raw(config.n_atoms_g0);
            r1 = heavy_tail_raw(config.n_atoms_g1);
        } else {
            r0 = random_raw(config.n_atoms_g0, gen);
            r1 = random_raw(config.n_atoms_g1, gen);
        }

        auto current = evaluate(r0, r1);
        // A tail-infeasible start is pulled toward 0 until it qualifies
        // (shrinking the support shrinks the tail constant to 0).
        for (int tries = 0; !current && tries < 200; ++tries) {
            for (double& a : r1.atoms) a *= 0.5;
            if (restart >= 2 && tries >= 60) r1 = rademacher_raw(config.n_atoms_g1);
            current = evaluate(r0, r1);
        }
        if (!current) continue;
        consider(current);

        double step = 0.5 * span;
        const double decay = std::pow(1e-3, 1.0 / config.iters);
        for (int it = 0; it < config.iters; ++it) {
            // One sweep over every movable coordinate: atom locations and
            // weight logits of both priors, both signs.
            for (int which = 0; which < 2; ++which) {
                detail::RawPrior& raw = which == 0 ? r0 : r1;
                if (raw.pinned()) continue;
                for (std::size_t j = 0; j < raw.atoms.size(); ++j) {
                    for (double sign : {+1.0, -1.0}) {
                        detail::RawPrior trial = raw;
                        trial.atoms[j] += sign * step;
                        auto ev = which == 0 ? evaluate(trial, r1) : evaluate(r0, trial);
                        const bool better = ev && ev->risk > current->risk;
                        consider(ev);
                        if (better) {
                            raw = std::move(trial);
                            current = std::move(ev);
                        }
                    }
                }
                for (std::size_t j = 0; j < raw.logits.size(); ++j) {
                    for (double sign : {+1.0, -1.0}) {
                        detail::RawPrior trial = raw;
                        trial.logits[j] += sign * 4.0 * step / span;
                        auto ev = which == 0 ? evaluate(trial, r1) : evaluate(r0, trial);
                        const bool better = ev && ev->risk > current->risk;
                        consider(ev);
                        if (better) {
                            raw = std::move(trial);
                            current = std::move(ev);
                        }
                    }
                }
            }
            step *= decay;
        }
    }

    if (!have_best)
        throw InfeasibleConfig("maximize_risk: no feasible candidate found for this config");
    return result;
}

}  // namespace ebrisk

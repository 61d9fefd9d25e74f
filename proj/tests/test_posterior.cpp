#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ebrisk/posterior.hpp"
#include "ebrisk/random.hpp"
#include "ebrisk/errors.hpp"

using namespace ebrisk;
using Catch::Approx;

namespace {

DiscretePrior random_discrete(std::mt19937_64& gen, int max_atoms = 12) {
    const int n = 2 + static_cast<int>(uniform01(gen) * (max_atoms - 1));
    std::vector<double> atoms(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        atoms[static_cast<std::size_t>(i)] = 10.0 * uniform01(gen) - 5.0;
        w[static_cast<std::size_t>(i)] = 0.05 + uniform01(gen);
        total += w[static_cast<std::size_t>(i)];
    }
    for (double& x : w) x /= total;
    return {atoms, w};
}

GaussianMixturePrior random_mixture(std::mt19937_64& gen, int max_comps = 5) {
    const int n = 1 + static_cast<int>(uniform01(gen) * max_comps);
    std::vector<double> mu(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n)),
        w(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        mu[static_cast<std::size_t>(i)] = 6.0 * uniform01(gen) - 3.0;
        v[static_cast<std::size_t>(i)] = 0.1 + 2.0 * uniform01(gen);
        w[static_cast<std::size_t>(i)] = 0.05 + uniform01(gen);
        total += w[static_cast<std::size_t>(i)];
    }
    for (double& x : w) x /= total;
    return {mu, v, w};
}

}  // namespace

TEST_CASE("log marginal density closed forms", "[posterior]") {
    const double log_sqrt_2pi = 0.91893853320467267;
    SECTION("two-point prior at the symmetry point") {
        // f(0) = phi(1), both atoms contribute equally
        REQUIRE(log_marginal_density(DiscretePrior::rademacher(1.0), 1.0, 0.0) ==
                Approx(-0.5 - log_sqrt_2pi).epsilon(1e-14));
    }
    SECTION("point mass is a single Gaussian") {
        REQUIRE(log_marginal_density(DiscretePrior::point_mass(0.0), 1.0, 0.0) ==
                Approx(-log_sqrt_2pi).epsilon(1e-14));
    }
    SECTION("conjugate convolution: N(0,1) prior, sigma 1 is N(0,2)") {
        REQUIRE(log_marginal_density(GaussianMixturePrior::gaussian(0.0, 1.0), 1.0, 2.0) ==
                Approx(-1.0 - 0.5 * std::log(4.0 * std::numbers::pi)).epsilon(1e-14));
    }
    SECTION("deep tails stay finite") {
        const Prior g = DiscretePrior::rademacher(1.0);
        const double lf = log_marginal_density(g, 0.05, 40.0);
        REQUIRE(std::isfinite(lf));
        REQUIRE(lf < -1e5);  // far out, tiny density, no underflow to -inf
    }
}

TEST_CASE("marginal score closed forms", "[posterior]") {
    SECTION("symmetry point has zero score") {
        REQUIRE(marginal_score(DiscretePrior::rademacher(1.0), 1.0, 0.0) ==
                Approx(0.0).margin(1e-15));
    }
    SECTION("two-point prior score at x = 1") {
        REQUIRE(marginal_score(DiscretePrior::rademacher(1.0), 1.0, 1.0) ==
                Approx(std::tanh(1.0) - 1.0).epsilon(1e-13));
    }
    SECTION("single Gaussian score is -x / (sigma^2 + tau^2)") {
        REQUIRE(marginal_score(DiscretePrior::point_mass(0.0), 2.0, 3.0) ==
                Approx(-0.75).epsilon(1e-14));
    }
}

TEST_CASE("posterior mean closed forms", "[posterior]") {
    SECTION("degenerate prior always answers its atom") {
        for (double x : {-7.0, 0.0, 3.0})
            REQUIRE(posterior_mean(DiscretePrior::point_mass(0.0), 0.7, x) == 0.0);
    }
    SECTION("conjugate shrinkage: lambda x with lambda = 1/2") {
        REQUIRE(posterior_mean(GaussianMixturePrior::gaussian(0.0, 1.0), 1.0, 1.6) ==
                Approx(0.8).epsilon(1e-14));
    }
    SECTION("two-point prior gives tanh(x / sigma^2)") {
        const Prior g = DiscretePrior::rademacher(1.0);
        for (double x : {-2.0, -0.3, 0.0, 1.0, 4.0})
            REQUIRE(posterior_mean(g, 1.0, x) == Approx(std::tanh(x)).margin(1e-13));
    }
}

TEST_CASE("score route reproduces the posterior mean", "[posterior]") {
    SECTION("worked examples") {
        REQUIRE(posterior_mean_tweedie(DiscretePrior::point_mass(0.0), 2.0, 3.0) ==
                Approx(0.0).margin(1e-13));
        REQUIRE(posterior_mean_tweedie(DiscretePrior::rademacher(1.0), 1.0, 1.0) ==
                Approx(std::tanh(1.0)).epsilon(1e-13));
    }
    SECTION("randomized agreement across scales") {
        std::mt19937_64 gen(derive_seed(21, 0));
        for (int rep = 0; rep < 50; ++rep) {
            const Prior g = rep % 2 == 0 ? Prior(random_discrete(gen)) : Prior(random_mixture(gen));
            for (double sigma : {0.05, 0.5, 1.0, 5.0, 50.0}) {
                const double half = 10.0 * sigma + 10.0;
                for (int i = 0; i <= 20; ++i) {
                    const double x = -half + 2.0 * half * i / 20.0;
                    const double direct = posterior_mean(g, sigma, x);
                    const double via_score = x + sigma * sigma * marginal_score(g, sigma, x);
                    REQUIRE(std::abs(direct - via_score) <= 1e-8 * (1.0 + std::abs(x)));
                }
            }
        }
    }
}

TEST_CASE("posterior second moment", "[posterior]") {
    SECTION("support on {-1, +1} pins theta^2 to 1") {
        const Prior g = DiscretePrior::rademacher(1.0);
        for (double x : {-3.0, 0.0, 0.5, 10.0})
            REQUIRE(posterior_second_moment(g, 1.0, x) == Approx(1.0).epsilon(1e-14));
    }
    SECTION("conjugate posterior N(0, 1/2) at x = 0") {
        REQUIRE(posterior_second_moment(GaussianMixturePrior::gaussian(0.0, 1.0), 1.0, 0.0) ==
                Approx(0.5).epsilon(1e-14));
    }
    SECTION("never below the squared mean") {
        std::mt19937_64 gen(derive_seed(22, 0));
        for (int rep = 0; rep < 30; ++rep) {
            const Prior g = rep % 2 == 0 ? Prior(random_discrete(gen)) : Prior(random_mixture(gen));
            for (double x = -8.0; x <= 8.0; x += 0.5) {
                const double pm = posterior_mean(g, 1.3, x);
                REQUIRE(posterior_second_moment(g, 1.3, x) >= pm * pm - 1e-12);
            }
        }
    }
}

TEST_CASE("posterior tail probability", "[posterior]") {
    const Prior rad = DiscretePrior::rademacher(1.0);
    SECTION("worked examples") {
        REQUIRE(posterior_tail(rad, 1.0, 0.0, 0.5) == Approx(0.5).epsilon(1e-14));
        REQUIRE(posterior_tail(rad, 1.0, 0.0, 1.5) == 0.0);
        REQUIRE(posterior_tail(GaussianMixturePrior::gaussian(0.0, 1.0), 1.0, 0.0, 0.0) ==
                Approx(0.5).epsilon(1e-14));
    }
    SECTION("strict inequality at an atom") {
        REQUIRE(posterior_tail(rad, 1.0, 0.0, 1.0) == 0.0);
        REQUIRE(posterior_tail(rad, 1.0, 0.0, -1.0) == Approx(0.5).epsilon(1e-14));
    }
    SECTION("in [0,1] and non-increasing in the threshold") {
        std::mt19937_64 gen(derive_seed(23, 0));
        for (int rep = 0; rep < 20; ++rep) {
            const Prior g = rep % 2 == 0 ? Prior(random_discrete(gen)) : Prior(random_mixture(gen));
            double prev = 1.0;
            for (double s = -6.0; s <= 6.0; s += 0.25) {
                const double p = posterior_tail(g, 0.8, 0.7, s);
                REQUIRE(p >= 0.0);
                REQUIRE(p <= prev + 1e-14);
                prev = p;
            }
        }
    }
}

TEST_CASE("posterior mean range and monotonicity", "[posterior]") {
    std::mt19937_64 gen(derive_seed(24, 0));
    for (int rep = 0; rep < 20; ++rep) {
        const DiscretePrior g = random_discrete(gen);
        const double lo = g.atoms().front();
        const double hi = g.atoms().back();
        for (double sigma : {0.1, 1.0, 10.0}) {
            double prev = -std::numeric_limits<double>::infinity();
            for (double x = -30.0; x <= 30.0; x += 0.5) {
                const double pm = posterior_mean(g, sigma, x);
                REQUIRE(pm >= lo - 1e-12);
                REQUIRE(pm <= hi + 1e-12);
                REQUIRE(pm >= prev - 1e-10);  // total positivity of the kernel
                prev = pm;
            }
        }
    }
}

TEST_CASE("extreme inputs stay stable", "[posterior]") {
    SECTION("tiny sigma snaps to the nearest atom") {
        const Prior g = DiscretePrior({-1.0, 0.5, 2.0}, {0.2, 0.5, 0.3});
        REQUIRE(posterior_mean(g, 1e-4, 0.4) == Approx(0.5).margin(1e-9));
        REQUIRE(posterior_mean(g, 1e-4, 1.9) == Approx(2.0).margin(1e-9));
    }
    SECTION("huge x keeps every functional finite") {
        const Prior g = DiscretePrior::rademacher(1.0);
        REQUIRE(posterior_mean(g, 0.05, 500.0) == Approx(1.0).margin(1e-12));
        REQUIRE(std::isfinite(marginal_score(g, 0.05, 500.0)));
        const Prior gm = GaussianMixturePrior({-1.0, 1.0}, {0.3, 0.3}, {0.5, 0.5});
        REQUIRE(std::isfinite(posterior_mean(gm, 1.0, 1e4)));
    }
}

TEST_CASE("sigma is validated", "[posterior]") {
    const Prior g = DiscretePrior::rademacher(1.0);
    REQUIRE_THROWS_AS(posterior_mean(g, 0.0, 1.0), InvalidSigma);
    REQUIRE_THROWS_AS(posterior_mean(g, -1.0, 1.0), InvalidSigma);
    REQUIRE_THROWS_AS(log_marginal_density(g, std::numeric_limits<double>::infinity(), 1.0),
                      InvalidSigma);
    REQUIRE_THROWS_AS(posterior_tail(g, 0.0, 1.0, 0.0), InvalidSigma);
}

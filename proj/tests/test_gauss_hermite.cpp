#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ebrisk/gauss_hermite.hpp"
#include "ebrisk/errors.hpp"

using namespace ebrisk;
using Catch::Approx;

namespace {

// Gamma((k+1)/2) for even k: the exact value of the physicists' moment
// integral of x^k against exp(-x^2).
double hermite_moment(int k) {
    // integral x^k e^{-x^2} dx = Gamma((k+1)/2) for even k, 0 for odd k.
    if (k % 2 == 1) return 0.0;
    return std::tgamma((k + 1) / 2.0);
}

}  // namespace

TEST_CASE("small rules match closed forms", "[quadrature]") {
    const double sqrt_pi = std::sqrt(std::numbers::pi);

    SECTION("n = 1") {
        const auto r = hermite_rule(1);
        REQUIRE(r.nodes.size() == 1);
        REQUIRE(r.nodes[0] == 0.0);
        REQUIRE(r.weights[0] == Approx(sqrt_pi).epsilon(1e-14));
    }
    SECTION("n = 2") {
        const auto r = hermite_rule(2);
        REQUIRE(r.nodes[0] == Approx(-std::sqrt(0.5)).epsilon(1e-14));
        REQUIRE(r.nodes[1] == Approx(std::sqrt(0.5)).epsilon(1e-14));
        REQUIRE(r.weights[0] == Approx(sqrt_pi / 2).epsilon(1e-14));
        REQUIRE(r.weights[1] == Approx(sqrt_pi / 2).epsilon(1e-14));
    }
    SECTION("n = 3") {
        const auto r = hermite_rule(3);
        REQUIRE(r.nodes[1] == 0.0);
        REQUIRE(r.nodes[2] == Approx(std::sqrt(1.5)).epsilon(1e-14));
        REQUIRE(r.weights[1] == Approx(2.0 * sqrt_pi / 3.0).epsilon(1e-13));
    }
}

TEST_CASE("weights are positive and sum to sqrt(pi)", "[quadrature]") {
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int n : {5, 20, 64, 121, 200}) {
        const auto r = hermite_rule(n);
        double total = 0.0;
        for (double w : r.weights) {
            REQUIRE(w > 0.0);
            total += w;
        }
        REQUIRE(total == Approx(sqrt_pi).epsilon(1e-12));
    }
}

TEST_CASE("nodes are ascending and antisymmetric", "[quadrature]") {
    for (int n : {4, 7, 121}) {
        const auto r = hermite_rule(n);
        for (std::size_t i = 1; i < r.nodes.size(); ++i) REQUIRE(r.nodes[i] > r.nodes[i - 1]);
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            REQUIRE(r.nodes[i] == Approx(-r.nodes[r.nodes.size() - 1 - i]).margin(1e-14));
        if (n % 2 == 1) REQUIRE(r.nodes[static_cast<std::size_t>(n / 2)] == 0.0);
    }
}

TEST_CASE("polynomial exactness up to degree 2n-1", "[quadrature]") {
    const auto r = hermite_rule(10);
    for (int k = 0; k <= 19; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            sum += r.weights[i] * std::pow(r.nodes[i], k);
        REQUIRE(sum == Approx(hermite_moment(k)).margin(1e-10 * (1.0 + hermite_moment(k))));
    }
}

TEST_CASE("normal rule integrates standard normal moments", "[quadrature]") {
    const auto r = normal_rule(21);

    double total = 0.0;
    for (double w : r.weights) total += w;
    REQUIRE(total == 1.0);  // normalized exactly at construction

    const double moments[] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0};
    for (int k = 0; k <= 8; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            sum += r.weights[i] * std::pow(r.nodes[i], k);
        REQUIRE(sum == Approx(moments[k]).margin(1e-12 * (1.0 + moments[k])));
    }
}

TEST_CASE("default-sized rule stays accurate", "[quadrature]") {
    const auto r = normal_rule(121);
    double m10 = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        m10 += r.weights[i] * std::pow(r.nodes[i], 10);
    REQUIRE(m10 == Approx(945.0).epsilon(1e-12));
}

TEST_CASE("node count is validated", "[quadrature]") {
    REQUIRE_THROWS_AS(hermite_rule(0), InvalidSpec);
    REQUIRE_THROWS_AS(hermite_rule(-3), InvalidSpec);
    REQUIRE_THROWS_AS(hermite_rule(1000), InvalidSpec);
    REQUIRE_NOTHROW(hermite_rule(350));
}

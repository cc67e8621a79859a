// test_quadrature.cpp — Gauss-Legendre tables, composite panels, graded grids

#include <doctest.h>

#include <oscidet/quadrature.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using oscidet::GaussLegendre;

TEST_CASE("rule tables are symmetric, ascending, and normalized") {
    for (int n : {1, 2, 3, 5, 8, 16, 32, 64}) {
        CAPTURE(n);
        const GaussLegendre& rule = oscidet::gauss_legendre(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        REQUIRE(rule.weights.size() == static_cast<std::size_t>(n));

        double weight_sum = 0.0;
        for (int k = 0; k < n; ++k) {
            weight_sum += rule.weights[k];
            CHECK(rule.weights[k] > 0.0);
            CHECK(std::abs(rule.nodes[k]) < 1.0);
            if (k > 0) {
                CHECK(rule.nodes[k] > rule.nodes[k - 1]);
            }
            // Nodes and weights are symmetric about the origin.
            CHECK(rule.nodes[k] ==
                  doctest::Approx(-rule.nodes[n - 1 - k]).epsilon(1e-15));
            CHECK(rule.weights[k] ==
                  doctest::Approx(rule.weights[n - 1 - k]).epsilon(1e-15));
        }
        CHECK(weight_sum == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("n-point rule integrates degree 2n-1 exactly") {
    for (int n : {2, 4, 7, 12}) {
        CAPTURE(n);
        const int degree = 2 * n - 1;
        // Monomial moments over [-1, 1]: 0 for odd d, 2/(d+1) for even d.
        for (int d = 0; d <= degree; ++d) {
            double got = 0.0;
            oscidet::for_each_gl_node(-1.0, 1.0, n, 1, [&](double t, double w) {
                got += w * std::pow(t, d);
            });
            const double want = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
            CAPTURE(d);
            CHECK(std::abs(got - want) <= 1e-13);
        }
        // Degree 2n reports a real error, i.e. the order claim is sharp.
        double extra = 0.0;
        oscidet::for_each_gl_node(-1.0, 1.0, n, 1, [&](double t, double w) {
            extra += w * std::pow(t, 2 * n);
        });
        CHECK(std::abs(extra - 2.0 / (2 * n + 1)) > 1e-10);
    }
}

TEST_CASE("composite panels integrate smooth functions to roundoff") {
    double sine = 0.0;
    oscidet::for_each_gl_node(0.0, std::numbers::pi, 16, 8,
                              [&](double t, double w) { sine += w * std::sin(t); });
    CHECK(sine == doctest::Approx(2.0).epsilon(1e-15));

    double gauss = 0.0;
    oscidet::for_each_gl_node(-8.0, 8.0, 24, 16, [&](double t, double w) {
        gauss += w * std::exp(-t * t);
    });
    CHECK(gauss == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("explicit boundary visitation matches the uniform splitter") {
    const std::vector<double> uniform = {2.0, 2.5, 3.0, 3.5, 4.0};
    double via_list = 0.0;
    double via_panels = 0.0;
    auto f = [](double t) { return std::cos(3.0 * t) / (1.0 + t); };
    oscidet::for_each_gl_node_on(uniform, 12,
                                 [&](double t, double w) { via_list += w * f(t); });
    oscidet::for_each_gl_node(2.0, 4.0, 12, 4,
                              [&](double t, double w) { via_panels += w * f(t); });
    CHECK(via_list == doctest::Approx(via_panels).epsilon(1e-15));
}

TEST_CASE("graded boundaries shrink geometrically toward the left endpoint") {
    const double a = 1.0;
    const double b = 3.0;
    const int levels = 20;
    const std::vector<double> g = oscidet::graded_boundaries(a, b, levels);

    REQUIRE(g.size() >= 3);
    CHECK(g.front() == a);
    CHECK(g.back() == b);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
    }
    // First panel is the finest, around (b - a) * 2^-levels.
    const double first = g[1] - g[0];
    CHECK(first <= (b - a) * std::pow(2.0, -levels + 1));
    // Widths never shrink as we move away from the graded end.
    for (std::size_t i = 2; i < g.size(); ++i) {
        CHECK(g[i] - g[i - 1] >= (g[i - 1] - g[i - 2]) * (1.0 - 1e-12));
    }
}

TEST_CASE("graded panels resolve an integrable endpoint singularity") {
    // int_0^1 t^-1/2 dt = 2; uniform panels stall, graded ones converge.  The
    // error is dominated by the single panel touching t = 0, whose exact
    // contribution is 2 * 2^(-levels/2), so deep grading buys full precision.
    const std::vector<double> g = oscidet::graded_boundaries(0.0, 1.0, 60);
    double got = 0.0;
    oscidet::for_each_gl_node_on(g, 16, [&](double t, double w) {
        got += w / std::sqrt(t);
    });
    CHECK(got == doctest::Approx(2.0).epsilon(1e-9));
}

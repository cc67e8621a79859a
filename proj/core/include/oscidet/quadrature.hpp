// quadrature.hpp — Gauss–Legendre tables and composite-panel integration
//
// All oscillatory integrals in the library are evaluated with composite
// Gauss–Legendre panels whose node counts are doubled until a caller-chosen
// relative-change target is met.  The node tables are built once per order by
// Newton iteration on the Legendre recurrence and cached.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace oscidet {

struct GaussLegendre {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;  // matching weights, sum = 2
};

// Cached n-point rule; thread-safe, deterministic.
const GaussLegendre& gauss_legendre(int n);

// Visit the nodes of an n-point rule on `panels` equal panels of [a, b] in
// ascending order, calling fn(t, w) at each node.  Deterministic order makes
// accumulation reproducible across runs and thread counts.
template <typename Fn>
void for_each_gl_node(double a, double b, int n, int panels, Fn&& fn) {
    const GaussLegendre& rule = gauss_legendre(n);
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        const double half = 0.5 * width;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            fn(mid + half * rule.nodes[k], half * rule.weights[k]);
        }
    }
}

// Same visitation over an explicit ascending panel-boundary list.
template <typename Fn>
void for_each_gl_node_on(const std::vector<double>& boundaries, int n,
                         Fn&& fn) {
    const GaussLegendre& rule = gauss_legendre(n);
    for (std::size_t p = 0; p + 1 < boundaries.size(); ++p) {
        const double lo = boundaries[p];
        const double hi = boundaries[p + 1];
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            fn(mid + half * rule.nodes[k], half * rule.weights[k]);
        }
    }
}

// Panel boundaries for [a, b] graded geometrically toward `a': the panel
// nearest `a' has width ~ (b - a) * ratio^(levels), each later panel doubling.
// Used for integrable endpoint structure (e.g. nu^(1/2) spectral edges).
std::vector<double> graded_boundaries(double a, double b, int levels);

}  // namespace oscidet

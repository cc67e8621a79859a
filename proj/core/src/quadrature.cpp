// quadrature.cpp — Gauss–Legendre node construction (Newton on the Legendre
// recurrence, extended precision) with a thread-safe cache.

#include "oscidet/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace oscidet {

namespace {

GaussLegendre build_rule(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: order must be >= 1");
    }
    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const long double pi_l = 3.14159265358979323846264338327950288L;

    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi-style initial guess for the i-th root (descending).
        long double x = std::cos(pi_l * (i + 0.75L) / (n + 0.5L));
        long double dp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P'_n(x).
            long double p0 = 1.0L;
            long double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 =
                    ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) {
                break;
            }
        }
        const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
        // Store symmetric pair, ascending order overall.
        rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(-x);
        rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] =
            static_cast<double>(x);
        rule.weights[static_cast<std::size_t>(n - 1 - i)] =
            static_cast<double>(w);
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, build_rule(n)).first;
    }
    return it->second;
}

std::vector<double> graded_boundaries(double a, double b, int levels) {
    if (!(b > a)) {
        throw std::invalid_argument("graded_boundaries: requires b > a");
    }
    std::vector<double> bounds;
    bounds.reserve(static_cast<std::size_t>(levels) + 2);
    bounds.push_back(a);
    double width = b - a;
    // Interior boundaries at a + width/2, a + width/4, ... inserted ascending.
    std::vector<double> interior;
    for (int k = 1; k <= levels; ++k) {
        width *= 0.5;
        interior.push_back(a + width);
    }
    for (auto it = interior.rbegin(); it != interior.rend(); ++it) {
        bounds.push_back(*it);
    }
    bounds.push_back(b);
    return bounds;
}

}  // namespace oscidet

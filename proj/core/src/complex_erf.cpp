// complex_erf.cpp — Faddeeva function via Weideman's rational expansion,
// and the stable finite-window Gaussian Fourier integral built on it.

#include "oscidet/complex_erf.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oscidet {

namespace {

using cd = std::complex<double>;

constexpr double kSqrtPi = 1.7724538509055160273;

// ---------------------- Weideman rational approximation ---------------------
//
// J.A.C. Weideman's method: w(z) for Im z >= 0 is approximated by an N-term
// polynomial in the Moebius variable Z = (L + iz)/(L - iz) plus the exact
// leading asymptotic term, where L = sqrt(N/sqrt(2)).  The polynomial
// coefficients are Fourier coefficients of a smooth function and are computed
// once, in extended precision, by a direct DFT.

constexpr int kN = 64;  // expansion order; ~1e-14 uniform accuracy

const std::array<double, kN>& weideman_coefficients() {
    static const std::array<double, kN> coeffs = [] {
        const int m = 2 * kN;
        const int m2 = 2 * m;
        const long double l =
            std::sqrt(static_cast<long double>(kN) / std::sqrt(2.0L));
        const long double pi_l = 3.14159265358979323846264338327950288L;

        // Sample f(theta) = exp(-t^2)(L^2 + t^2), t = L tan(theta/2), on the
        // uniform theta grid, with f = 0 at the end point theta = -pi.
        std::vector<long double> f(static_cast<std::size_t>(m2), 0.0L);
        for (int k = -m + 1; k <= m - 1; ++k) {
            const long double theta = static_cast<long double>(k) * pi_l / m;
            const long double t = l * std::tan(theta / 2.0L);
            f[static_cast<std::size_t>(k + m)] =
                std::exp(-t * t) * (l * l + t * t);
        }

        // fftshift then the real part of the forward DFT, coefficient n.
        std::vector<long double> shifted(static_cast<std::size_t>(m2));
        for (int j = 0; j < m2; ++j) {
            shifted[static_cast<std::size_t>(j)] =
                f[static_cast<std::size_t>((j + m) % m2)];
        }
        std::array<double, kN> out{};
        for (int n = 1; n <= kN; ++n) {
            long double acc = 0.0L;
            for (int j = 0; j < m2; ++j) {
                acc += shifted[static_cast<std::size_t>(j)] *
                       std::cos(2.0L * pi_l * j * n / m2);
            }
            // Highest-degree coefficient first (Horner order): index 0 holds
            // the coefficient of Z^(N-1), which is the n = N Fourier term.
            out[static_cast<std::size_t>(kN - n)] =
                static_cast<double>(acc / m2);
        }
        return out;
    }();
    return coeffs;
}

cd weideman_w(cd z) {
    static const double l =
        std::sqrt(static_cast<double>(kN) / std::numbers::sqrt2);
    const auto& a = weideman_coefficients();
    const cd iz(-z.imag(), z.real());
    const cd denom = l - iz;
    const cd big_z = (l + iz) / denom;
    cd p(0.0, 0.0);
    for (int n = 0; n < kN; ++n) {
        p = p * big_z + a[static_cast<std::size_t>(n)];
    }
    return 2.0 * p / (denom * denom) + (1.0 / kSqrtPi) / denom;
}

}  // namespace

cd faddeeva_w(cd z) {
    if (z.imag() >= 0.0) {
        return weideman_w(z);
    }
    // w(z) = 2 exp(-z^2) - w(-z); only used for completeness, never hit by
    // internal callers (their arguments are kept in the upper half-plane).
    return 2.0 * std::exp(-z * z) - weideman_w(-z);
}

cd erfcx(cd z) {
    if (z.real() >= 0.0) {
        // erfcx(z) = w(iz); Im(iz) = Re(z) >= 0, Weideman applies directly.
        return weideman_w(cd(-z.imag(), z.real()));
    }
    return 2.0 * std::exp(z * z) - erfcx(-z);
}

double erfcx(double x) {
    if (x >= 0.0) {
        return weideman_w(cd(0.0, x)).real();
    }
    return 2.0 * std::exp(x * x) - erfcx(-x);
}

// ----------------------- finite-window Gaussian integral ---------------------

ScaledComplex gaussian_window_integral_log(double a, double t0, cd z,
                                           double lo, double hi) {
    if (hi <= lo) {
        return ScaledComplex{0.0, cd(0.0, 0.0)};
    }
    const double sqrt_a = std::sqrt(a);
    const cd half_z = z / (2.0 * sqrt_a);
    const cd u_lo = sqrt_a * (lo - t0) + half_z;
    const cd u_hi = sqrt_a * (hi - t0) + half_z;
    const cd q = half_z * half_z - z * t0;  // z^2/(4a) - z t0

    // Exactly cancelled exponents of the two boundary terms:
    //   q - u_x^2 = -a (x - t0)^2 - z x
    const cd e_lo = -a * (lo - t0) * (lo - t0) - z * lo;
    const cd e_hi = -a * (hi - t0) * (hi - t0) - z * hi;

    // W = pref * e^q [erfc(u_lo) - erfc(u_hi)], with each erfc reflected to a
    // nonnegative-real-part erfcx argument.  Re u_lo <= Re u_hi always, so the
    // e^q bookkeeping term appears with weight 0 (both reflected or neither)
    // or 2 (only u_lo reflected) and never cancels catastrophically.
    struct Term {
        double log_mag;
        cd phase_mantissa;
    };
    std::array<Term, 3> terms{};
    int n_terms = 0;
    double q_weight = 0.0;

    if (u_lo.real() >= 0.0) {
        terms[static_cast<std::size_t>(n_terms++)] =
            Term{e_lo.real(), std::polar(1.0, e_lo.imag()) * erfcx(u_lo)};
    } else {
        q_weight += 2.0;
        terms[static_cast<std::size_t>(n_terms++)] =
            Term{e_lo.real(), -std::polar(1.0, e_lo.imag()) * erfcx(-u_lo)};
    }
    if (u_hi.real() >= 0.0) {
        terms[static_cast<std::size_t>(n_terms++)] =
            Term{e_hi.real(), -std::polar(1.0, e_hi.imag()) * erfcx(u_hi)};
    } else {
        q_weight -= 2.0;
        terms[static_cast<std::size_t>(n_terms++)] =
            Term{e_hi.real(), std::polar(1.0, e_hi.imag()) * erfcx(-u_hi)};
    }
    if (q_weight != 0.0) {
        terms[static_cast<std::size_t>(n_terms++)] =
            Term{q.real(), q_weight * std::polar(1.0, q.imag())};
    }

    double log_max = terms[0].log_mag;
    for (int i = 1; i < n_terms; ++i) {
        log_max = std::max(log_max, terms[static_cast<std::size_t>(i)].log_mag);
    }
    cd mantissa(0.0, 0.0);
    for (int i = 0; i < n_terms; ++i) {
        const auto& t = terms[static_cast<std::size_t>(i)];
        mantissa += t.phase_mantissa * std::exp(t.log_mag - log_max);
    }

    const double pref = kSqrtPi / (2.0 * sqrt_a);
    return ScaledComplex{log_max + std::log(pref), mantissa};
}

cd gaussian_window_integral(double a, double t0, cd z, double lo, double hi) {
    return gaussian_window_integral_log(a, t0, z, lo, hi).value();
}

// ---- log-domain accumulation ----

void LogSum::add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) {
        return;
    }
    if (empty_) {
        max_ = log_term;
        sum_ = 1.0;
        empty_ = false;
        return;
    }
    if (log_term > max_) {
        sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
        max_ = log_term;
    } else {
        sum_ += std::exp(log_term - max_);
    }
}

void LogSum::add(double log_scale, double weight) {
    if (weight <= 0.0) {
        return;
    }
    add(log_scale + std::log(weight));
}

double LogSum::log_value() const {
    if (empty_) {
        return -std::numeric_limits<double>::infinity();
    }
    return max_ + std::log(sum_);
}

ScaledComplex scaled_sum(const ScaledComplex* terms, std::size_t count) {
    double pivot = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        if (terms[i].mantissa != cd(0.0, 0.0)) {
            pivot = std::max(pivot, terms[i].log_scale);
        }
    }
    if (pivot == -std::numeric_limits<double>::infinity()) {
        return ScaledComplex{pivot, cd(0.0, 0.0)};
    }
    cd mantissa(0.0, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        if (terms[i].mantissa != cd(0.0, 0.0)) {
            mantissa += terms[i].mantissa * std::exp(terms[i].log_scale - pivot);
        }
    }
    return ScaledComplex{pivot, mantissa};
}

ScaledComplex scaled_sum(const std::vector<ScaledComplex>& terms) {
    return scaled_sum(terms.data(), terms.size());
}

}  // namespace oscidet

// complex_erf.hpp — scaled complementary error function and stable
// finite-window Gaussian Fourier integrals
//
// The workhorse is erfcx(z) = exp(z^2) erfc(z) for complex z with Re z >= 0,
// evaluated through the Faddeeva function w(zeta) = exp(-zeta^2) erfc(-i zeta)
// via erfcx(z) = w(iz).  Every closed-form time integral in this library is
// arranged so that only Re z >= 0 arguments are ever needed and so that all
// large exponents cancel analytically before evaluation; results that live at
// exp(-thousands) scale are returned as (log_scale, mantissa) pairs.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace oscidet {

// A complex value v represented as v = mantissa * exp(log_scale), so that
// magnitudes far below the double underflow threshold stay representable.
struct ScaledComplex {
    double log_scale{0.0};
    std::complex<double> mantissa{0.0, 0.0};

    // Collapse to a plain complex number (may under/overflow; fine for
    // benign magnitudes).
    std::complex<double> value() const {
        return mantissa * std::exp(log_scale);
    }
};

// erfcx(z) = exp(z^2) erfc(z).
// Accurate to ~1e-13 relative for Re z >= 0 (any imaginary part).  For
// Re z < 0 the reflection erfcx(z) = 2 exp(z^2) - erfcx(-z) is applied and
// may overflow for large |z|; internal callers never take that branch.
std::complex<double> erfcx(std::complex<double> z);

// Real-argument convenience overload (same accuracy contract).
double erfcx(double x);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
std::complex<double> faddeeva_w(std::complex<double> z);

// Stable evaluation of the finite-window Gaussian Fourier integral
//
//   W = integral_{lo}^{hi} exp(-a (t - t0)^2 - z t) dt,   a > 0, z complex.
//
// Closed form: W = sqrt(pi)/(2 sqrt(a)) * e^q [erf(u_hi) - erf(u_lo)] with
// u_x = sqrt(a)(x - t0) + z/(2 sqrt(a)) and q = z^2/(4a) - z t0.  The naive
// form overflows because e^q and erf(u) are separately astronomical; here the
// exact cancellations q - u_x^2 = -a (x - t0)^2 - z x are applied per branch
// and the result is returned log-scaled.
ScaledComplex gaussian_window_integral_log(double a, double t0,
                                           std::complex<double> z,
                                           double lo, double hi);

// Plain-valued convenience wrapper for benign magnitudes.
std::complex<double> gaussian_window_integral(double a, double t0,
                                              std::complex<double> z,
                                              double lo, double hi);

// Stable accumulator for sums of positive terms given by their logarithms
// (streaming log-sum-exp pivoted on the running maximum).
class LogSum {
public:
    // Add a term exp(log_term); -inf terms are ignored.
    void add(double log_term);
    // Add weight * exp(log_scale) with a nonnegative linear-scale weight.
    void add(double log_scale, double weight);
    // ln of the accumulated sum; -inf when nothing was added.
    double log_value() const;

private:
    bool empty_{true};
    double max_{0.0};
    double sum_{0.0};
};

// Sum of log-scaled complex terms, returned log-scaled (pivot on the largest
// scale so mantissas stay O(1)).  Zero-mantissa / -inf terms are skipped.
ScaledComplex scaled_sum(const ScaledComplex* terms, std::size_t count);
ScaledComplex scaled_sum(const std::vector<ScaledComplex>& terms);

}  // namespace oscidet

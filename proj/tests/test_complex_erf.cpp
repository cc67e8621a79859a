// test_complex_erf.cpp — scaled complementary error function, window
// integrals, and log-scale accumulators
//
// Reference values were produced with an independent arbitrary-precision
// implementation (mpmath, 50 digits) and are frozen here; the tolerance of
// a few ulps leaves room for the different summation orders of the two
// implementations.

#include <doctest.h>

#include <oscidet/complex_erf.hpp>
#include <oscidet/quadrature.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

using oscidet::LogSum;
using oscidet::ScaledComplex;
using cplx = std::complex<double>;

namespace {

constexpr double kErfcxRelTol = 2e-13;

void check_close(cplx got, cplx want, double rel_tol) {
    CAPTURE(got.real());
    CAPTURE(got.imag());
    CAPTURE(want.real());
    CAPTURE(want.imag());
    CHECK(std::abs(got - want) <= rel_tol * std::abs(want));
}

}  // namespace

TEST_CASE("erfcx matches the frozen real-axis table") {
    const struct {
        double x;
        double want;
    } table[] = {
        {1e-8, 0.99999998871620832},
        {0.1, 0.89645697996912677},
        {0.5, 0.61569034419292579},
        {1.0, 0.427583576155807},
        {2.0, 0.2553956763105058},
        {3.0, 0.17900115118138998},
        {5.0, 0.11070463773306861},
        {10.0, 0.056140992743822588},
        {50.0, 0.011281536265323772},
        {100.0, 0.005641613782989433},
        {1000.0, 0.00056418930145338763},
        {1e6, 5.6418958354747418e-7},
    };
    for (const auto& row : table) {
        CAPTURE(row.x);
        CHECK(std::abs(oscidet::erfcx(row.x) - row.want) <=
              kErfcxRelTol * row.want);
        // The complex overload must agree with the real one on the axis.
        check_close(oscidet::erfcx(cplx(row.x, 0.0)), cplx(row.want, 0.0),
                    kErfcxRelTol);
    }
}

TEST_CASE("erfcx matches the frozen complex table") {
    const struct {
        cplx z;
        cplx want;
    } table[] = {
        {{0.3, 5.0}, {0.0071936623836765202, -0.1147839655114901}},
        {{2.0, 3.0}, {0.092710766426443436, -0.12831696222826169}},
        {{1e-3, 100.0}, {5.6427423309335902e-8, -0.0056421779720297787}},
        {{7.0, 0.1}, {0.079784545146282276, -0.0011176273919586586}},
        {{0.0, 2.0}, {0.018315638888734179, -0.34002621706606623}},
        {{0.25, -40.0}, {8.8233942602839255e-5, 0.014108599478276217}},
    };
    for (const auto& row : table) {
        CAPTURE(row.z.real());
        CAPTURE(row.z.imag());
        check_close(oscidet::erfcx(row.z), row.want, kErfcxRelTol);
    }
}

TEST_CASE("erfcx is conjugate-symmetric in the right half-plane") {
    const cplx points[] = {{0.1, 0.2}, {1.5, 4.0}, {6.0, -0.5}, {0.0, 3.0},
                           {12.0, 25.0}, {0.01, -80.0}};
    for (cplx z : points) {
        const cplx a = oscidet::erfcx(std::conj(z));
        const cplx b = std::conj(oscidet::erfcx(z));
        check_close(a, b, 1e-14);
    }
}

TEST_CASE("faddeeva_w is erfcx rotated by -i") {
    // w(z) = e^{-z^2} erfc(-iz) = erfcx(-iz), valid where Im(z) >= 0.
    const cplx points[] = {{0.5, 0.5}, {3.0, 1.0}, {-2.0, 0.25}, {0.0, 1.0},
                           {10.0, 0.01}};
    for (cplx z : points) {
        check_close(oscidet::faddeeva_w(z),
                    oscidet::erfcx(cplx(0.0, -1.0) * z), 1e-14);
    }
}

TEST_CASE("gaussian window integral matches frozen references") {
    // int_lo^hi exp(-a (t - t0)^2 - z t) dt, moderate magnitudes.
    const struct {
        double a, t0;
        cplx z;
        double lo, hi;
        cplx want;
    } table[] = {
        {0.02, 12.0, {0.5, 3.0}, 0.0, 30.0,
         {0.00012643967148360732, -0.018795029973677851}},
        {1.3, -2.0, {0.05, -1.2}, 0.0, 4.0,
         {0.00093646643765714593, 0.00018606963469908216}},
        {0.5, 35.0, {0.01, 2.5}, 0.0, 30.0,
         {3.2400911875957688e-7, 3.6093688184980848e-7}},
    };
    for (const auto& row : table) {
        CAPTURE(row.a);
        CAPTURE(row.t0);
        const cplx got =
            oscidet::gaussian_window_integral(row.a, row.t0, row.z, row.lo,
                                              row.hi);
        check_close(got, row.want, 5e-13);
        // The log-scaled form must agree after unscaling.
        const ScaledComplex log_form = oscidet::gaussian_window_integral_log(
            row.a, row.t0, row.z, row.lo, row.hi);
        check_close(log_form.value(), row.want, 5e-13);
    }
}

TEST_CASE("gaussian window integral agrees with direct quadrature") {
    // Benign parameters where brute-force Gauss-Legendre converges; the
    // closed form (difference of scaled erf values) must match it.
    const struct {
        double a, t0;
        cplx z;
        double lo, hi;
    } cases[] = {
        {0.3, 2.0, {0.1, 1.7}, 0.0, 8.0},
        {1.0, 0.0, {0.0, 0.0}, -1.0, 1.0},
        {0.05, 10.0, {0.2, -4.0}, 3.0, 25.0},
        {2.0, 4.5, {1.0, 9.0}, 0.0, 9.0},
    };
    for (const auto& c : cases) {
        CAPTURE(c.a);
        CAPTURE(c.t0);
        cplx direct(0.0, 0.0);
        oscidet::for_each_gl_node(c.lo, c.hi, 32, 64, [&](double t, double w) {
            direct += w * std::exp(cplx(-c.a * (t - c.t0) * (t - c.t0), 0.0) -
                                   c.z * t);
        });
        const cplx got =
            oscidet::gaussian_window_integral(c.a, c.t0, c.z, c.lo, c.hi);
        check_close(got, direct, 1e-11);
    }
}

TEST_CASE("log-scaled window integral survives far-underflow exponents") {
    // Center far outside the window: the plain value underflows (the peak
    // contribution is exp(-a (hi-t0)^2) ~ e^-5000) but the scaled form keeps
    // a usable mantissa.  Verified against quadrature of the integrand with
    // the scale factored out.
    const double a = 0.5;
    const double t0 = 200.0;
    const cplx z(0.0, 3.0);
    const double lo = 0.0;
    const double hi = 100.0;

    const ScaledComplex got =
        oscidet::gaussian_window_integral_log(a, t0, z, lo, hi);
    CHECK(got.log_scale < -4000.0);
    CHECK(std::isfinite(got.log_scale));
    CHECK(std::abs(got.mantissa) > 1e-8);
    CHECK(std::abs(got.mantissa) < 1e8);

    // Reference: integrate exp(-a (t-t0)^2 - z t - S) directly; with
    // S = log_scale the integrand is representable.  The mass sits in the
    // last few units below `hi', so grade the panels toward that endpoint.
    const double s = got.log_scale;
    cplx reference(0.0, 0.0);
    const std::vector<double> panels =
        oscidet::graded_boundaries(lo, hi, 40);
    // graded_boundaries grades toward the first argument; mirror it.
    std::vector<double> mirrored;
    for (auto it = panels.rbegin(); it != panels.rend(); ++it) {
        mirrored.push_back(lo + hi - *it);
    }
    oscidet::for_each_gl_node_on(mirrored, 32, [&](double t, double w) {
        const double log_mag = -a * (t - t0) * (t - t0) - z.real() * t - s;
        if (log_mag < -700.0) {
            return;
        }
        reference += w * std::exp(cplx(log_mag, -z.imag() * t));
    });
    check_close(got.mantissa, reference, 1e-10);
}

TEST_CASE("ScaledComplex::value unscales and saturates sensibly") {
    const ScaledComplex benign{2.0, {0.5, -0.25}};
    check_close(benign.value(), std::exp(2.0) * cplx(0.5, -0.25), 1e-15);

    const ScaledComplex tiny{-10000.0, {1.0, 1.0}};
    CHECK(std::abs(tiny.value()) == 0.0);
}

TEST_CASE("LogSum reproduces log-sum-exp across extreme scales") {
    LogSum acc;
    CHECK(acc.log_value() == -std::numeric_limits<double>::infinity());

    acc.add(0.0);
    acc.add(0.0);
    CHECK(acc.log_value() == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    LogSum wide;
    wide.add(-1000.0);
    wide.add(-1001.0);
    wide.add(-990.0);
    const double want =
        -990.0 + std::log(1.0 + std::exp(-10.0) + std::exp(-11.0));
    CHECK(wide.log_value() == doctest::Approx(want).epsilon(1e-15));

    // -inf contributions must be ignored, not poison the sum.
    LogSum with_zero;
    with_zero.add(-std::numeric_limits<double>::infinity());
    with_zero.add(3.0);
    CHECK(with_zero.log_value() == doctest::Approx(3.0).epsilon(1e-15));

    // Weighted form: weight * exp(scale).
    LogSum weighted;
    weighted.add(-500.0, 2.0);
    weighted.add(-500.0, 3.0);
    CHECK(weighted.log_value() ==
          doctest::Approx(-500.0 + std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("scaled_sum pivots on the dominant term") {
    std::vector<ScaledComplex> terms;
    terms.push_back({-2000.0, {1.0, 0.0}});
    terms.push_back({-2000.0, {0.0, 1.0}});
    terms.push_back({-2050.0, {5.0, 0.0}});  // negligible but finite
    const ScaledComplex total = oscidet::scaled_sum(terms);
    CHECK(total.log_scale == doctest::Approx(-2000.0).epsilon(1e-12));
    check_close(total.mantissa,
                cplx(1.0 + 5.0 * std::exp(-50.0), 1.0), 1e-14);

    // Exact cancellation of the dominant pair leaves the small remainder.
    std::vector<ScaledComplex> cancel;
    cancel.push_back({-100.0, {1.0, 0.0}});
    cancel.push_back({-100.0, {-1.0, 0.0}});
    cancel.push_back({-130.0, {1.0, 0.0}});
    const cplx remainder = oscidet::scaled_sum(cancel).value();
    check_close(remainder, cplx(std::exp(-130.0), 0.0), 1e-13);

    // Empty input is an exact zero.
    const ScaledComplex none = oscidet::scaled_sum(nullptr, 0);
    CHECK(std::abs(none.mantissa) == 0.0);
}

// oscillation.hpp — flavor amplitudes for oscillating particles and the
// detection-kernel family
//
// Natural units (hbar = c = 1) throughout: one scenario-wide energy unit, all
// lengths and times in its inverse.  A scenario holds Gaussian wave packets of
// mass eigenstates (m_i, p_i, Gamma_i) superposed through a unitary mixing
// matrix; a detection model holds the threshold energy, the masses of the
// reaction products whose position is resolved to delta, and an overall
// constant.  The kernel F(s) is the two-time correlation of the product
// propagator; its saddle-point closed form has an exact spectral
// representation F(s)/F(0) = integral rho(nu) e^{-i nu s} d nu with rho a
// (convolution of) Gamma density(ies), which downstream code exploits.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace oscidet::osc {

// ------------------------------- domain types -------------------------------

struct MassEigenstate {
    double mass{0.0};        // m_i >= 0
    double momentum{0.0};    // p_i > 0
    double decay_rate{0.0};  // Gamma_i >= 0

    double energy() const;    // E_i = sqrt(m^2 + p^2)
    double velocity() const;  // v_i = p/E

    void validate(std::vector<std::string>& errors, std::size_t index) const;
};

struct MixingMatrix {
    Eigen::MatrixXcd u;  // rows: flavor alpha, columns: mass i

    Eigen::Index dim() const { return u.rows(); }

    // 2-flavor rotation [[cos, sin], [-sin, cos]].
    static MixingMatrix rotation_2f(double theta);

    // Unitarity within 1e-12 (max-entry norm), square shape.
    void validate() const;
};

struct OscillationScenario {
    std::vector<MassEigenstate> states;
    MixingMatrix mixing;
    double sigma{0.0};      // packet spread (length units), > 0
    int initial_flavor{0};  // beta

    // Mixing-weight pair for detected flavor alpha and mass state i:
    // conj(U_{beta i}) U_{alpha i}.
    std::complex<double> pair_coefficient(int alpha, std::size_t i) const;

    // sigma > 0; sigma * min(p_i) >= 100 (narrow-momentum-spread regime);
    // nonempty state list; mixing dimension matches; flavor index in range.
    void validate() const;
};

struct DetectionModel {
    double threshold{0.0};               // epsilon_th >= 0
    std::vector<double> product_masses;  // M_n > 0
    double localization{0.0};            // delta > 0
    double overall_constant{1.0};        // K > 0 (absorbed by normalization)

    // Spectral rates S_n = 2 M_n delta^2 of the kernel representation.
    std::vector<double> spectral_rates() const;

    void validate() const;
};

// ------------------------------- amplitudes ---------------------------------

// Plane-wave flavor amplitude: sum_i conj(U_{beta i}) U_{alpha i}
// exp(i p_i x - i E_i t).
std::complex<double> plane_wave_amplitude(const OscillationScenario& scenario,
                                          int alpha, double t, double x);

// Linearized Gaussian-packet amplitude:
// sum_i conj(U_{beta i}) U_{alpha i} (pi sigma^2)^{-1/4}
//   exp(-(x - v_i t)^2 / (2 sigma^2) + i(p_i x - E_i t) - Gamma_i t).
std::complex<double> gaussian_amplitude(const OscillationScenario& scenario,
                                        int alpha, double t, double x);

struct QuadratureControl {
    double rel_tol{1e-10};
    int initial_nodes{64};
    long max_nodes{1L << 20};
};

// Exact momentum-integral amplitude (oracle for the linearized form):
// sum_i conj(U_{beta i}) U_{alpha i} (2 pi)^{-1/2} (sigma^2/pi)^{1/4}
//   integral dp exp(-sigma^2 (p - p_i)^2 / 2 + i p x - i E_i(p) t) e^{-Gamma_i t}
// with E_i(p) = sqrt(m_i^2 + p^2) and the decay rate frozen at p_i.
std::complex<double> momentum_integral_amplitude(
    const OscillationScenario& scenario, int alpha, double t, double x,
    QuadratureControl control = {});

// --------------------------------- kernels ----------------------------------

// Saddle-point (small-momentum) closed form of the detection kernel:
//   F(s) = K * prod_n (pi / (delta^2 + i s / (2 M_n)))^{3/2},
// principal branch (the argument stays in the right half-plane, so the power
// is continuous in s and F(-s) = conj F(s)).  Requires M_n delta >= 10 for
// every product mass (ValidationError otherwise): the quadratic expansion of
// the product dispersion is only trustworthy in that regime.
std::complex<double> kernel_F_saddle(const DetectionModel& model, double s);

// Defining integral of the kernel, one radial quadrature per product mass:
//   F(s) = K * prod_n 4 pi integral_0^pmax p^2
//            exp(-delta^2 p^2 - i (sqrt(M_n^2 + p^2) - M_n) s) dp.
// Oracle for kernel_F_saddle; no validity restriction on M_n delta.
std::complex<double> kernel_F_numeric(const DetectionModel& model, double s,
                                      QuadratureControl control = {});

// ln rho(nu) of the exact spectral representation of the normalized saddle
// kernel: F(s)/F(0) = integral_0^inf rho(nu) e^{-i nu s} d nu.  Each product
// mass contributes a Gamma(shape 3/2, rate S_n) density; equal rates combine
// in closed form, distinct rates are convolved numerically.  Returns -inf for
// nu <= 0.
double log_spectral_density(const DetectionModel& model, double nu);

}  // namespace oscidet::osc

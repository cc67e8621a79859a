// oscillation.cpp — scenario/model validation, flavor amplitudes, the two
// kernel evaluators, and the spectral density of the saddle kernel.

#include "oscidet/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "oscidet/complex_erf.hpp"
#include "oscidet/errors.hpp"
#include "oscidet/quadrature.hpp"

namespace oscidet::osc {

namespace {

using cd = std::complex<double>;

constexpr double kUnitarityTol = 1e-12;
constexpr double kMinSigmaMomentum = 100.0;
constexpr double kMinSaddleMassLocalization = 10.0;

// ln of the Gamma(shape a, rate s) density at nu > 0.
double log_gamma_density(double shape, double rate, double nu) {
    if (nu <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return shape * std::log(rate) + (shape - 1.0) * std::log(nu) - rate * nu -
           std::lgamma(shape);
}

// Distinct-rate components of the spectral density, equal rates merged.
struct SpectralComponent {
    double shape;
    double rate;
};

std::vector<SpectralComponent> spectral_components(
    const DetectionModel& model) {
    std::map<double, double> shape_by_rate;
    for (double rate : model.spectral_rates()) {
        shape_by_rate[rate] += 1.5;
    }
    std::vector<SpectralComponent> components;
    components.reserve(shape_by_rate.size());
    for (const auto& [rate, shape] : shape_by_rate) {
        components.push_back(SpectralComponent{shape, rate});
    }
    return components;
}

// ln of the convolution of the first `count` components at nu, by recursive
// quadrature.  The substitution mu = nu sin^2(theta) removes the integrable
// power singularities at both ends, so plain Gauss–Legendre converges fast.
double log_convolved_density(const std::vector<SpectralComponent>& components,
                             std::size_t count, double nu) {
    if (nu <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (count == 1) {
        return log_gamma_density(components[0].shape, components[0].rate, nu);
    }
    const SpectralComponent& last = components[count - 1];
    const double half_pi = std::numbers::pi / 2.0;

    auto evaluate = [&](int nodes) {
        LogSum sum;
        for_each_gl_node(0.0, half_pi, nodes, 1, [&](double theta, double w) {
            const double sin_t = std::sin(theta);
            const double cos_t = std::cos(theta);
            const double jacobian = 2.0 * nu * sin_t * cos_t;
            const double log_term =
                log_gamma_density(last.shape, last.rate, nu * sin_t * sin_t) +
                log_convolved_density(components, count - 1,
                                      nu * cos_t * cos_t);
            sum.add(log_term, w * jacobian);
        });
        return sum.log_value();
    };

    double previous = evaluate(24);
    for (int nodes = 48; nodes <= 384; nodes *= 2) {
        const double value = evaluate(nodes);
        if (std::abs(value - previous) < 1e-12 ||
            (value == -std::numeric_limits<double>::infinity() &&
             previous == value)) {
            return value;
        }
        previous = value;
    }
    return previous;
}

}  // namespace

// ------------------------------- domain types -------------------------------

double MassEigenstate::energy() const {
    return std::hypot(mass, momentum);
}

double MassEigenstate::velocity() const {
    return momentum / energy();
}

void MassEigenstate::validate(std::vector<std::string>& errors,
                              std::size_t index) const {
    const std::string name = "state[" + std::to_string(index) + "]";
    if (mass < 0.0) {
        errors.push_back(name + ": mass must be >= 0");
    }
    if (momentum <= 0.0) {
        errors.push_back(name + ": momentum must be > 0");
    }
    if (decay_rate < 0.0) {
        errors.push_back(name + ": decay_rate must be >= 0");
    }
}

MixingMatrix MixingMatrix::rotation_2f(double theta) {
    MixingMatrix m;
    m.u.resize(2, 2);
    m.u << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return m;
}

void MixingMatrix::validate() const {
    if (u.rows() == 0 || u.rows() != u.cols()) {
        throw ValidationError("MixingMatrix: matrix must be square, nonempty");
    }
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    if ((u.adjoint() * u - eye).cwiseAbs().maxCoeff() > kUnitarityTol ||
        (u * u.adjoint() - eye).cwiseAbs().maxCoeff() > kUnitarityTol) {
        throw ValidationError("MixingMatrix: matrix is not unitary (1e-12)");
    }
}

cd OscillationScenario::pair_coefficient(int alpha, std::size_t i) const {
    return std::conj(mixing.u(initial_flavor, static_cast<Eigen::Index>(i))) *
           mixing.u(alpha, static_cast<Eigen::Index>(i));
}

void OscillationScenario::validate() const {
    std::vector<std::string> errors;
    if (states.empty()) {
        errors.push_back("state list must be nonempty");
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        states[i].validate(errors, i);
    }
    try {
        mixing.validate();
    } catch (const ValidationError& e) {
        errors.push_back(e.what());
    }
    if (mixing.dim() != static_cast<Eigen::Index>(states.size())) {
        errors.push_back("mixing dimension does not match state count");
    }
    if (!(sigma > 0.0)) {
        errors.push_back("sigma must be > 0");
    } else if (!states.empty()) {
        double min_p = states[0].momentum;
        for (const auto& s : states) {
            min_p = std::min(min_p, s.momentum);
        }
        if (min_p > 0.0 && sigma * min_p < kMinSigmaMomentum) {
            errors.push_back(
                "sigma * min(momentum) must be >= 100 "
                "(narrow-momentum-spread regime); got " +
                std::to_string(sigma * min_p));
        }
    }
    if (initial_flavor < 0 ||
        initial_flavor >= static_cast<int>(states.size())) {
        errors.push_back("initial_flavor index out of range");
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "OscillationScenario validation failed:";
        for (const auto& e : errors) {
            msg << "\n  - " << e;
        }
        throw ValidationError(msg.str());
    }
}

std::vector<double> DetectionModel::spectral_rates() const {
    std::vector<double> rates;
    rates.reserve(product_masses.size());
    for (double m : product_masses) {
        rates.push_back(2.0 * m * localization * localization);
    }
    return rates;
}

void DetectionModel::validate() const {
    std::vector<std::string> errors;
    if (threshold < 0.0) {
        errors.push_back("threshold must be >= 0");
    }
    if (product_masses.empty()) {
        errors.push_back("product_masses must be nonempty");
    }
    for (std::size_t n = 0; n < product_masses.size(); ++n) {
        if (product_masses[n] <= 0.0) {
            errors.push_back("product_masses[" + std::to_string(n) +
                             "] must be > 0");
        }
    }
    if (!(localization > 0.0)) {
        errors.push_back("localization must be > 0");
    }
    if (!(overall_constant > 0.0)) {
        errors.push_back("overall_constant must be > 0");
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "DetectionModel validation failed:";
        for (const auto& e : errors) {
            msg << "\n  - " << e;
        }
        throw ValidationError(msg.str());
    }
}

// ------------------------------- amplitudes ---------------------------------

cd plane_wave_amplitude(const OscillationScenario& scenario, int alpha,
                        double t, double x) {
    scenario.validate();
    if (alpha < 0 || alpha >= static_cast<int>(scenario.states.size())) {
        throw ValidationError("plane_wave_amplitude: flavor index out of range");
    }
    cd amplitude(0.0, 0.0);
    for (std::size_t i = 0; i < scenario.states.size(); ++i) {
        const auto& s = scenario.states[i];
        amplitude += scenario.pair_coefficient(alpha, i) *
                     std::polar(1.0, s.momentum * x - s.energy() * t);
    }
    return amplitude;
}

cd gaussian_amplitude(const OscillationScenario& scenario, int alpha, double t,
                      double x) {
    scenario.validate();
    if (alpha < 0 || alpha >= static_cast<int>(scenario.states.size())) {
        throw ValidationError("gaussian_amplitude: flavor index out of range");
    }
    if (t < 0.0) {
        throw ValidationError("gaussian_amplitude: t must be >= 0");
    }
    const double norm =
        std::pow(std::numbers::pi * scenario.sigma * scenario.sigma, -0.25);
    cd amplitude(0.0, 0.0);
    for (std::size_t i = 0; i < scenario.states.size(); ++i) {
        const auto& s = scenario.states[i];
        const double dx = x - s.velocity() * t;
        const double envelope =
            -dx * dx / (2.0 * scenario.sigma * scenario.sigma) -
            s.decay_rate * t;
        amplitude += scenario.pair_coefficient(alpha, i) * norm *
                     std::exp(envelope) *
                     std::polar(1.0, s.momentum * x - s.energy() * t);
    }
    return amplitude;
}

cd momentum_integral_amplitude(const OscillationScenario& scenario, int alpha,
                               double t, double x, QuadratureControl control) {
    scenario.validate();
    if (alpha < 0 || alpha >= static_cast<int>(scenario.states.size())) {
        throw ValidationError(
            "momentum_integral_amplitude: flavor index out of range");
    }
    const double sigma = scenario.sigma;
    const double norm = std::pow(sigma * sigma / std::numbers::pi, 0.25) /
                        std::sqrt(2.0 * std::numbers::pi);
    const double half_width = 8.5 / sigma;  // covers > 8 momentum sigmas

    cd amplitude(0.0, 0.0);
    for (std::size_t i = 0; i < scenario.states.size(); ++i) {
        const auto& s = scenario.states[i];
        const double p_lo = s.momentum - half_width;
        const double p_hi = s.momentum + half_width;

        auto evaluate = [&](long nodes) {
            const int per_panel = 32;
            const int panels =
                static_cast<int>((nodes + per_panel - 1) / per_panel);
            cd acc(0.0, 0.0);
            for_each_gl_node(p_lo, p_hi, per_panel, panels,
                             [&](double p, double w) {
                                 const double dp = p - s.momentum;
                                 const double energy = std::hypot(s.mass, p);
                                 acc += w *
                                        std::exp(-sigma * sigma * dp * dp /
                                                 2.0) *
                                        std::polar(1.0, p * x - energy * t);
                             });
            return acc;
        };

        long nodes = control.initial_nodes;
        cd value = evaluate(nodes);
        while (true) {
            nodes *= 2;
            const cd refined = evaluate(nodes);
            const double change = std::abs(refined - value) /
                                  std::max(std::abs(refined), 1e-300);
            value = refined;
            if (change < control.rel_tol) {
                break;
            }
            if (nodes >= control.max_nodes) {
                throw AccuracyError(
                    "momentum_integral_amplitude: quadrature did not converge",
                    std::abs(value), std::abs(refined));
            }
        }
        amplitude += scenario.pair_coefficient(alpha, i) * norm * value *
                     std::exp(-s.decay_rate * t);
    }
    return amplitude;
}

// --------------------------------- kernels ----------------------------------

cd kernel_F_saddle(const DetectionModel& model, double s) {
    model.validate();
    const double delta = model.localization;
    for (double m : model.product_masses) {
        if (m * delta < kMinSaddleMassLocalization) {
            throw ValidationError(
                "kernel_F_saddle: requires M*delta >= 10 for every product "
                "mass (saddle-point validity); got " +
                std::to_string(m * delta));
        }
    }
    cd result(model.overall_constant, 0.0);
    for (double m : model.product_masses) {
        const cd argument(delta * delta, s / (2.0 * m));
        // Principal branch; Re(argument) > 0 keeps it continuous in s.
        result *= std::pow(std::numbers::pi / argument, 1.5);
    }
    return result;
}

cd kernel_F_numeric(const DetectionModel& model, double s,
                    QuadratureControl control) {
    model.validate();
    const double delta = model.localization;
    const double p_max = 9.0 / delta;  // Gaussian tail below e^-81

    cd result(model.overall_constant, 0.0);
    for (double m : model.product_masses) {
        auto evaluate = [&](long nodes) {
            const int per_panel = 32;
            const int panels =
                static_cast<int>((nodes + per_panel - 1) / per_panel);
            cd acc(0.0, 0.0);
            for_each_gl_node(
                0.0, p_max, per_panel, panels, [&](double p, double w) {
                    const double omega = std::hypot(m, p) - m;
                    acc += w * p * p * std::exp(-delta * delta * p * p) *
                           std::polar(1.0, -omega * s);
                });
            return 4.0 * std::numbers::pi * acc;
        };

        long nodes = control.initial_nodes;
        cd value = evaluate(nodes);
        while (true) {
            nodes *= 2;
            const cd refined = evaluate(nodes);
            const double change = std::abs(refined - value) /
                                  std::max(std::abs(refined), 1e-300);
            value = refined;
            if (change < control.rel_tol) {
                break;
            }
            if (nodes >= control.max_nodes) {
                throw AccuracyError(
                    "kernel_F_numeric: radial quadrature did not converge",
                    std::abs(value), std::abs(refined));
            }
        }
        result *= value;
    }
    return result;
}

double log_spectral_density(const DetectionModel& model, double nu) {
    model.validate();
    if (nu <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const auto components = spectral_components(model);
    return log_convolved_density(components, components.size(), nu);
}

}  // namespace oscidet::osc

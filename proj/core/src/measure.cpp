// measure.cpp — restricted propagators and the detection-time-summed
// probability measure on finite-dimensional systems.

#include "oscidet/measure.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "oscidet/errors.hpp"
#include "oscidet/quadrature.hpp"

namespace oscidet::measure {

namespace {

using cd = std::complex<double>;

constexpr double kStructureTol = 1e-12;
constexpr double kQuadRelTarget = 1e-8;
constexpr double kQuadRelAccept = 1e-6;
constexpr long kQuadNodeCap = 1L << 20;

// Eigendecomposition of a Hermitian matrix, reused to evaluate e^{-iAt} for
// many t at O(dim^2) each.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const Eigen::MatrixXcd& a) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error(
                "HermitianPropagator: eigendecomposition failed");
        }
        eigenvalues_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
        adjoint_ = vectors_.adjoint();
    }

    // e^{-iAt}
    Eigen::MatrixXcd at(double t) const {
        const Eigen::Index n = eigenvalues_.size();
        Eigen::VectorXcd phases(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            phases(k) = std::polar(1.0, -eigenvalues_(k) * t);
        }
        return vectors_ * phases.asDiagonal() * adjoint_;
    }

    // e^{-iAt} v
    Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd coeffs = adjoint_ * v;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            coeffs(k) *= std::polar(1.0, -eigenvalues_(k) * t);
        }
        return vectors_ * coeffs;
    }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd vectors_;
    Eigen::MatrixXcd adjoint_;
};

double max_entry_norm(const Eigen::MatrixXcd& a) {
    return a.cwiseAbs().maxCoeff();
}

void check_projector(const Eigen::MatrixXcd& p, const std::string& name,
                     std::vector<std::string>& errors) {
    if (max_entry_norm(p - p.adjoint()) > kStructureTol) {
        errors.push_back(name + " is not Hermitian");
    }
    if (max_entry_norm(p * p - p) > kStructureTol) {
        errors.push_back(name + " is not idempotent");
    }
}

Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd base, long exponent) {
    Eigen::MatrixXcd result =
        Eigen::MatrixXcd::Identity(base.rows(), base.cols());
    while (exponent > 0) {
        if (exponent & 1L) {
            result = result * base;
        }
        exponent >>= 1;
        if (exponent > 0) {
            base = base * base;
        }
    }
    return result;
}

// Squared norm of the t-integral of a vector integrand over [0, T], with the
// library-wide node-doubling convergence policy.
template <typename Integrand>
double converged_squared_norm(Integrand&& integrand, Eigen::Index dim,
                              double t_final, int start_nodes) {
    if (t_final == 0.0) {
        return 0.0;
    }
    long nodes = std::max(start_nodes, 2);
    double previous = 0.0;
    bool have_previous = false;
    while (true) {
        const int per_panel = 32;
        const int panels =
            static_cast<int>((nodes + per_panel - 1) / per_panel);
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
        for_each_gl_node(0.0, t_final, per_panel, panels,
                         [&](double t, double w) { acc += w * integrand(t); });
        const double value = acc.squaredNorm();
        if (have_previous) {
            const double change =
                std::abs(value - previous) / std::max(std::abs(value), 1e-300);
            if (change < kQuadRelTarget) {
                return value;
            }
            if (nodes >= kQuadNodeCap) {
                if (change <= kQuadRelAccept) {
                    return value;
                }
                throw AccuracyError(
                    "detection_probability: time quadrature did not converge "
                    "(relative change " +
                        std::to_string(change) + " at node cap)",
                    previous, value);
            }
        }
        previous = value;
        have_previous = true;
        nodes *= 2;
    }
}

}  // namespace

// ------------------------------- domain types -------------------------------

Eigen::MatrixXcd FiniteSystem::no_detection_projector() const {
    return Eigen::MatrixXcd::Identity(dim(), dim()) - detection_projector;
}

void FiniteSystem::validate() const {
    std::vector<std::string> errors;
    const Eigen::Index n = dim();
    if (n == 0) {
        throw ValidationError("FiniteSystem: dimension must be positive");
    }
    if (hamiltonian.cols() != n) {
        throw ValidationError("FiniteSystem: hamiltonian must be square");
    }
    if (max_entry_norm(hamiltonian - hamiltonian.adjoint()) > kStructureTol) {
        errors.push_back("hamiltonian is not Hermitian");
    }
    if (detection_projector.rows() != n || detection_projector.cols() != n) {
        errors.push_back("detection_projector dimension mismatch");
    } else {
        check_projector(detection_projector, "detection_projector", errors);
    }

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < outcome_projectors.size(); ++k) {
        const auto& pk = outcome_projectors[k];
        const std::string name = "outcome_projector[" + std::to_string(k) + "]";
        if (pk.rows() != n || pk.cols() != n) {
            errors.push_back(name + " dimension mismatch");
            continue;
        }
        check_projector(pk, name, errors);
        for (std::size_t j = 0; j < k; ++j) {
            if (max_entry_norm(pk * outcome_projectors[j]) > kStructureTol) {
                errors.push_back(name + " overlaps outcome_projector[" +
                                 std::to_string(j) + "]");
            }
        }
        sum += pk;
    }
    if (detection_projector.rows() == n &&
        max_entry_norm(sum - detection_projector) > kStructureTol) {
        errors.push_back("outcome projectors do not sum to detection_projector");
    }

    if (initial_state.size() != n) {
        errors.push_back("initial_state dimension mismatch");
    } else {
        if (std::abs(initial_state.norm() - 1.0) > kStructureTol) {
            errors.push_back("initial_state is not normalized");
        }
        if (detection_projector.rows() == n) {
            const Eigen::VectorXcd q_psi =
                no_detection_projector() * initial_state;
            if ((q_psi - initial_state).cwiseAbs().maxCoeff() > kStructureTol) {
                // P = identity leaves no no-detection subspace at all; flag
                // that configuration separately.
                if (max_entry_norm(detection_projector -
                                   Eigen::MatrixXcd::Identity(n, n)) <=
                    kStructureTol) {
                    errors.push_back(
                        "detection_projector is the identity: no no-detection "
                        "subspace remains for the initial state");
                } else {
                    errors.push_back(
                        "initial_state is not inside the no-detection "
                        "subspace");
                }
            }
        }
    }

    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "FiniteSystem validation failed:";
        for (const auto& e : errors) {
            msg << "\n  - " << e;
        }
        throw ValidationError(msg.str());
    }
}

void SplitSystem::validate() const {
    base.validate();
    std::vector<std::string> errors;
    const Eigen::Index n = base.dim();
    if (h0.rows() != n || h0.cols() != n || h_interaction.rows() != n ||
        h_interaction.cols() != n) {
        throw ValidationError("SplitSystem: component dimension mismatch");
    }
    const Eigen::MatrixXcd q = base.no_detection_projector();
    if (max_entry_norm(h0 * q - q * h0) > kStructureTol) {
        errors.push_back("[H0, Q] != 0");
    }
    if (max_entry_norm(h0 + coupling_scale * h_interaction -
                       base.hamiltonian) > kStructureTol) {
        errors.push_back("h0 + g*h_interaction does not reproduce hamiltonian");
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "SplitSystem validation failed:";
        for (const auto& e : errors) {
            msg << "\n  - " << e;
        }
        throw ValidationError(msg.str());
    }
}

void TimeWindow::validate() const {
    if (t_final < 0.0) {
        throw ValidationError("TimeWindow: t_final must be >= 0");
    }
    if (node_count < 2) {
        throw ValidationError("TimeWindow: node_count must be >= 2");
    }
    if (zeno_slices < 1) {
        throw ValidationError("TimeWindow: zeno_slices must be >= 1");
    }
}

// -------------------------------- operations --------------------------------

Eigen::MatrixXcd restricted_propagator(const FiniteSystem& system, double t,
                                       PropagatorMode mode) {
    system.validate();
    if (t < 0.0) {
        throw ValidationError("restricted_propagator: t must be >= 0");
    }
    const Eigen::MatrixXcd q = system.no_detection_projector();
    if (mode.kind == PropagatorMode::Kind::product) {
        if (mode.slices < 1) {
            throw ValidationError(
                "restricted_propagator: product mode needs slices >= 1");
        }
        const HermitianPropagator u(system.hamiltonian);
        const Eigen::MatrixXcd slice =
            q * u.at(t / static_cast<double>(mode.slices)) * q;
        return matrix_power(slice, mode.slices);
    }
    const HermitianPropagator restricted(q * system.hamiltonian * q);
    return q * restricted.at(t) * q;
}

Eigen::VectorXcd event_amplitude_density(const FiniteSystem& system, double t,
                                         std::size_t lambda, double t_final) {
    system.validate();
    if (lambda >= system.outcome_projectors.size()) {
        throw ValidationError("event_amplitude_density: invalid outcome index");
    }
    if (t < 0.0 || t > t_final) {
        throw ValidationError(
            "event_amplitude_density: requires 0 <= t <= t_final");
    }
    const Eigen::MatrixXcd q = system.no_detection_projector();
    const HermitianPropagator full(system.hamiltonian);
    const HermitianPropagator restricted(q * system.hamiltonian * q);

    const Eigen::VectorXcd s_psi =
        q * restricted.apply(t, q * system.initial_state);
    const Eigen::VectorXcd emitted =
        system.outcome_projectors[lambda] * (system.hamiltonian * s_psi);
    return cd(0.0, -1.0) * full.apply(t_final - t, emitted);
}

double detection_probability(const FiniteSystem& system, std::size_t lambda,
                             const TimeWindow& window) {
    system.validate();
    window.validate();
    if (lambda >= system.outcome_projectors.size()) {
        throw ValidationError("detection_probability: invalid outcome index");
    }
    const Eigen::MatrixXcd q = system.no_detection_projector();
    const HermitianPropagator full(system.hamiltonian);
    const HermitianPropagator restricted(q * system.hamiltonian * q);
    const Eigen::VectorXcd q_psi = q * system.initial_state;
    const Eigen::MatrixXcd& p_lambda = system.outcome_projectors[lambda];

    // The unitary prefactor e^{-iHT} of the event amplitude drops out of the
    // squared norm, leaving the integrand e^{iHt} P_lambda H S_t psi0.
    auto integrand = [&](double t) -> Eigen::VectorXcd {
        const Eigen::VectorXcd s_psi = q * restricted.apply(t, q_psi);
        const Eigen::VectorXcd emitted =
            p_lambda * (system.hamiltonian * s_psi);
        return full.apply(-t, emitted);
    };
    return converged_squared_norm(integrand, system.dim(), window.t_final,
                                  window.node_count);
}

double detection_probability_perturbative(const SplitSystem& system,
                                          std::size_t lambda,
                                          const TimeWindow& window) {
    system.validate();
    window.validate();
    if (lambda >= system.base.outcome_projectors.size()) {
        throw ValidationError(
            "detection_probability_perturbative: invalid outcome index");
    }
    const HermitianPropagator free_evolution(system.h0);
    const Eigen::MatrixXcd& p_lambda = system.base.outcome_projectors[lambda];

    // Coupling factored out: computed at unit g, rescaled by g^2 afterwards,
    // so the g^2 scaling of the result is exact by construction.
    auto integrand = [&](double t) -> Eigen::VectorXcd {
        const Eigen::VectorXcd driven =
            free_evolution.apply(t, system.base.initial_state);
        const Eigen::VectorXcd emitted =
            p_lambda * (system.h_interaction * driven);
        return free_evolution.apply(-t, emitted);
    };
    const double unit = converged_squared_norm(
        integrand, system.base.dim(), window.t_final, window.node_count);
    return system.coupling_scale * system.coupling_scale * unit;
}

double no_detection_probability(const FiniteSystem& system,
                                const TimeWindow& window) {
    system.validate();
    window.validate();
    double total = 0.0;
    for (std::size_t lambda = 0; lambda < system.outcome_projectors.size();
         ++lambda) {
        total += detection_probability(system, lambda, window);
    }
    return 1.0 - total;
}

double survival_probability(const FiniteSystem& system, double t_final,
                            PropagatorMode mode) {
    const Eigen::MatrixXcd s = restricted_propagator(system, t_final, mode);
    return (s * system.initial_state).squaredNorm();
}

double detection_probability_mixture(
    const FiniteSystem& system,
    const std::vector<std::pair<double, Eigen::VectorXcd>>& ensemble,
    std::size_t lambda, const TimeWindow& window) {
    double total = 0.0;
    for (const auto& [weight, state] : ensemble) {
        FiniteSystem pure = system;
        pure.initial_state = state;
        total += weight * detection_probability(pure, lambda, window);
    }
    return total;
}

}  // namespace oscidet::measure

// measure.hpp — time-unresolved detection probabilities for small quantum
// systems
//
// A detector is modelled by an orthogonal projector P (detection subspace,
// resolved into mutually exclusive outcomes P_lambda) and Q = 1 - P.  As long
// as no detection has occurred the state evolves with the restricted (Zeno)
// propagator S_t = lim_{N->inf} (Q e^{-iHt/N} Q)^N = Q e^{-i(QHQ)t} Q, and the
// probability that outcome lambda fires at an unobserved time in [0, T] is the
// squared norm of the time-integrated event amplitude
//
//   p(lambda) = || integral_0^T e^{iHt} P_lambda H S_t psi0 dt ||^2 .
//
// The measure is additive over outcomes and perturbative in the inter-subspace
// coupling; the no-detection probability is its complement 1 - sum p(lambda).

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace oscidet::measure {

// ------------------------------- domain types -------------------------------

// Hamiltonian + detection structure + initial state, all finite-dimensional.
struct FiniteSystem {
    Eigen::MatrixXcd hamiltonian;                      // Hermitian, energy units
    Eigen::MatrixXcd detection_projector;              // P, orthogonal projector
    std::vector<Eigen::MatrixXcd> outcome_projectors;  // {P_lambda}, sum = P
    Eigen::VectorXcd initial_state;                    // psi0, in the Q-subspace

    Eigen::Index dim() const { return hamiltonian.rows(); }
    Eigen::MatrixXcd no_detection_projector() const;   // Q = 1 - P (derived)

    // Throws ValidationError listing every violated structural invariant
    // (hermiticity, projector algebra, outcome exclusivity/exhaustiveness,
    // normalized initial state inside the Q-subspace).  Tolerance 1e-12 in
    // max-entry norm throughout.
    void validate() const;
};

// A system whose Hamiltonian is split as H = H0 + g * H_int with [H0, Q] = 0,
// the form required by the leading-order (perturbative) probability.
struct SplitSystem {
    FiniteSystem base;
    Eigen::MatrixXcd h0;
    Eigen::MatrixXcd h_interaction;
    double coupling_scale{1.0};  // g

    // Checks [H0, Q] = 0 and h0 + g*h_interaction == base.hamiltonian (1e-12).
    void validate() const;
};

// Observation window and quadrature/product-limit controls.
struct TimeWindow {
    double t_final{0.0};   // T >= 0
    int node_count{64};    // starting quadrature nodes (>= 2)
    long zeno_slices{1};   // N for product-mode propagators (>= 1)

    void validate() const;
};

// Which realization of S_t to use: the finite product or its N->inf limit.
struct PropagatorMode {
    enum class Kind { product, generator };
    Kind kind{Kind::generator};
    long slices{1};

    static PropagatorMode generator() {
        return PropagatorMode{Kind::generator, 1};
    }
    static PropagatorMode product(long n) {
        return PropagatorMode{Kind::product, n};
    }
};

// -------------------------------- operations --------------------------------

// S_t.  Product mode: (Q e^{-iHt/N} Q)^N by binary powering; generator mode:
// Q e^{-i(QHQ)t} Q.  Both are contractions (singular values <= 1 + 1e-10).
Eigen::MatrixXcd restricted_propagator(const FiniteSystem& system, double t,
                                       PropagatorMode mode);

// Event amplitude per unit time at detection time t inside window [0, T]:
//   -i e^{-iH(T-t)} P_lambda H S_t psi0      (generator-mode S_t)
Eigen::VectorXcd event_amplitude_density(const FiniteSystem& system, double t,
                                         std::size_t lambda, double t_final);

// Probability that outcome lambda fires during [0, T].  Composite
// Gauss–Legendre in t starting from window.node_count nodes, doubled until the
// relative change is < 1e-8 (cap 2^20 nodes; a residual change > 1e-6 at the
// cap raises AccuracyError carrying both values).
double detection_probability(const FiniteSystem& system, std::size_t lambda,
                             const TimeWindow& window);

// Leading-order probability for a split system: the same time integral with
// e^{-iH0 t} in place of the full restricted dynamics.  Scales exactly as g^2.
double detection_probability_perturbative(const SplitSystem& system,
                                          std::size_t lambda,
                                          const TimeWindow& window);

// Complement of the summed detection probability, 1 - sum_lambda p(lambda).
double no_detection_probability(const FiniteSystem& system,
                                const TimeWindow& window);

// Squared norm of S_T psi0 — the Zeno survival weight.  Identically 1 in
// generator mode (the restricted evolution is unitary on the Q-subspace);
// < 1 for finite products, approaching 1 as N grows.
double survival_probability(const FiniteSystem& system, double t_final,
                            PropagatorMode mode);

// Probability of outcome lambda for a statistical mixture sum_k w_k
// |psi_k><psi_k| of Q-subspace states: the measure is linear in the density
// operator, so this is the w-weighted sum of the pure-state probabilities.
double detection_probability_mixture(
    const FiniteSystem& system,
    const std::vector<std::pair<double, Eigen::VectorXcd>>& ensemble,
    std::size_t lambda, const TimeWindow& window);

}  // namespace oscidet::measure

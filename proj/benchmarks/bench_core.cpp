// bench_core.cpp — microbenchmarks for the numerical hot paths
//
// Rough shape of the cost model: a detection curve is (L points) x (nu nodes)
// x (states) window integrals, each one erfcx call; the threshold scan and the
// baselines multiply curves by fits.  The benchmarks below cover each layer.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include <oscidet/analysis.hpp>
#include <oscidet/complex_erf.hpp>
#include <oscidet/engine.hpp>
#include <oscidet/measure.hpp>
#include <oscidet/oscillation.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace osc = oscidet::osc;
namespace eng = oscidet::engine;
namespace ana = oscidet::analysis;
namespace ms = oscidet::measure;
using cplx = std::complex<double>;

namespace {

osc::OscillationScenario anchor_scenario() {
    osc::OscillationScenario sc;
    sc.states = {{0.5, 5.0, 0.0}, {1.0, 5.0, 0.0}};
    sc.mixing = osc::MixingMatrix::rotation_2f(std::numbers::pi / 4.0);
    sc.sigma = 20.0;
    sc.initial_flavor = 0;
    return sc;
}

osc::DetectionModel anchor_detection() {
    osc::DetectionModel model;
    model.threshold = 4.5;
    model.product_masses = {1.0};
    model.localization = 1.0;
    return model;
}

ms::FiniteSystem four_level_system() {
    ms::FiniteSystem sys;
    sys.hamiltonian = Eigen::MatrixXcd{
        {cplx(0.6, 0.0), cplx(0.3, 0.2), cplx(0.1, -0.4), cplx(0.25, 0.0)},
        {cplx(0.3, -0.2), cplx(-0.2, 0.0), cplx(0.35, 0.15), cplx(0.0, -0.3)},
        {cplx(0.1, 0.4), cplx(0.35, -0.15), cplx(0.45, 0.0), cplx(0.2, 0.1)},
        {cplx(0.25, 0.0), cplx(0.0, 0.3), cplx(0.2, -0.1), cplx(-0.5, 0.0)}};
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(4, 4);
    q(0, 0) = 1.0;
    q(1, 1) = 1.0;
    sys.detection_projector = Eigen::MatrixXcd::Identity(4, 4) - q;
    for (int k = 2; k < 4; ++k) {
        Eigen::MatrixXcd pk = Eigen::MatrixXcd::Zero(4, 4);
        pk(k, k) = 1.0;
        sys.outcome_projectors.push_back(pk);
    }
    sys.initial_state =
        Eigen::Vector4cd(cplx(0.8, 0.0), cplx(0.0, 0.6), cplx(0.0), cplx(0.0));
    return sys;
}

void bm_erfcx_real(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(oscidet::erfcx(x));
        x = x < 50.0 ? x * 1.37 : 0.1;
    }
}
BENCHMARK(bm_erfcx_real);

void bm_erfcx_complex(benchmark::State& state) {
    cplx z(0.3, 5.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(oscidet::erfcx(z));
        z = std::abs(z) < 60.0 ? z * 1.31 : cplx(0.3, 5.0);
    }
}
BENCHMARK(bm_erfcx_complex);

void bm_window_integral(benchmark::State& state) {
    // Engine-typical arguments: narrow packet far inside a long window, a
    // detuning in z of a few tenths.
    const double a = 1.0 / 800.0;
    const double t0 = 1500.0;
    const cplx z(1e-4, 0.35);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            oscidet::gaussian_window_integral_log(a, t0, z, 0.0, 30000.0));
    }
}
BENCHMARK(bm_window_integral);

void bm_kernel_saddle(benchmark::State& state) {
    const osc::DetectionModel model{0.0, {100.0}, 1.0, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(osc::kernel_F_saddle(model, 50.0));
    }
}
BENCHMARK(bm_kernel_saddle);

void bm_kernel_numeric(benchmark::State& state) {
    const osc::DetectionModel model{0.0, {100.0}, 1.0, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(osc::kernel_F_numeric(model, 50.0));
    }
}
BENCHMARK(bm_kernel_numeric);

void bm_spectral_density_gamma(benchmark::State& state) {
    const osc::DetectionModel model{0.0, {3.5, 3.5}, 1.0, 1.0};
    double nu = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(osc::log_spectral_density(model, nu));
        nu = nu < 40.0 ? nu * 1.53 : 1e-3;
    }
}
BENCHMARK(bm_spectral_density_gamma);

void bm_spectral_density_convolved(benchmark::State& state) {
    const osc::DetectionModel model{0.0, {1.0, 2.5}, 1.0, 1.0};
    double nu = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(osc::log_spectral_density(model, nu));
        nu = nu < 40.0 ? nu * 1.53 : 1e-3;
    }
}
BENCHMARK(bm_spectral_density_convolved);

void bm_pair_overlap(benchmark::State& state) {
    const osc::OscillationScenario sc = anchor_scenario();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            eng::pair_overlap_G(sc, 0, 1, 40.0, 3.0, 80.0));
    }
}
BENCHMARK(bm_pair_overlap);

void bm_detection_curve_point(benchmark::State& state) {
    eng::DensityRequest req;
    req.scenario = anchor_scenario();
    req.detection = anchor_detection();
    req.flavor = 1;
    req.l_grid = {40.0};
    req.window = eng::WindowPolicy::fixed(80.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eng::detection_density(req));
    }
}
BENCHMARK(bm_detection_curve_point)->Unit(benchmark::kMillisecond);

void bm_measure_probability(benchmark::State& state) {
    const ms::FiniteSystem sys = four_level_system();
    const ms::TimeWindow window{2.0, 64, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ms::detection_probability(sys, 0, window));
    }
}
BENCHMARK(bm_measure_probability)->Unit(benchmark::kMillisecond);

void bm_fit_oscillation(benchmark::State& state) {
    osc::OscillationScenario sc;
    sc.states = {{0.1, 10.0, 0.0}, {0.2, 10.0, 0.0}};
    sc.mixing = osc::MixingMatrix::rotation_2f(std::numbers::pi / 4.0);
    sc.sigma = 10.0;
    sc.initial_flavor = 0;

    eng::DetectionCurve curve;
    const double k = 0.003;
    for (int i = 0; i < 181; ++i) {
        const double l = 1200.0 + i * (6283.0 / 180.0);
        curve.l_values.push_back(l);
        curve.values.push_back(0.5 - 0.5 * std::cos(k * l));
    }
    curve.meta.t_window = 3e4;

    ana::FitModel model;
    model.initial_wavenumber = k;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ana::fit_oscillation(curve, sc, model));
    }
}
BENCHMARK(bm_fit_oscillation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

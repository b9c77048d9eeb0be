#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stochwave/circle_kernel.hpp"
#include "stochwave/noise.hpp"
#include "stochwave/stats.hpp"

using namespace stochwave;

namespace {
std::vector<double> flatten(const NoiseGrid& g) {
    std::vector<double> out;
    out.reserve(g.spec().cells());
    for (int n = 0; n < g.spec().nt; ++n)
        for (int j = 0; j < g.spec().nx; ++j) out.push_back(g.increment(n, j));
    return out;
}
}  // namespace

TEST_CASE("generation is deterministic in (spec, seed)") {
    GridSpec spec = GridSpec::make(1.0, 64, 0.5);
    NoiseGrid a = NoiseGrid::generate(spec, 42);
    NoiseGrid b = NoiseGrid::generate(spec, 42);
    CHECK(flatten(a) == flatten(b));
    CHECK(flatten(a) == flatten(a.materialized()));
    NoiseGrid c = NoiseGrid::generate(spec, 43);
    CHECK(flatten(a) != flatten(c));
}

TEST_CASE("neighboring seeds are empirically uncorrelated") {
    GridSpec spec = GridSpec::make(1.0, 128, 0.5);  // 8192 cells
    std::vector<double> a = flatten(NoiseGrid::generate(spec, 1000));
    std::vector<double> b = flatten(NoiseGrid::generate(spec, 1001));
    double band = 4.0 / std::sqrt(static_cast<double>(a.size()));
    CHECK(std::abs(sample_correlation(a, b)) < band);
}

TEST_CASE("normalized increments have mean 0 and variance 1") {
    GridSpec spec = GridSpec::make(1.0, 128, 0.5);  // nt*nx = 8192... use bigger time
    spec = GridSpec::make(1.0, 128, 1.0);           // 16384 cells
    std::vector<double> xs = flatten(NoiseGrid::generate(spec, 7));
    const double scale = std::sqrt(spec.cell_area());
    for (double& x : xs) x /= scale;
    CHECK(std::abs(sample_mean(xs)) < 4.0 / std::sqrt(static_cast<double>(xs.size())));
    CHECK(sample_variance(xs) == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("one cell regenerated across seeds has variance dt*dx") {
    GridSpec spec = GridSpec::make(1.0, 16, 0.25);
    std::vector<double> draws(10000);
    for (int s = 0; s < 10000; ++s)
        draws[s] = NoiseGrid::generate(spec, 5000 + s).increment(2, 7);
    CHECK(sample_variance(draws) == doctest::Approx(spec.cell_area()).epsilon(0.05));
}

TEST_CASE("disjoint rectangles are uncorrelated") {
    GridSpec spec = GridSpec::make(1.0, 32, 0.25);
    const int n_seeds = 2000;
    std::vector<double> a(n_seeds), b(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
        NoiseGrid g = NoiseGrid::generate(spec, 90000 + s);
        double sa = 0.0, sb = 0.0;
        for (int n = 0; n < 4; ++n)
            for (int j = 0; j < 8; ++j) {
                sa += g.increment(n, j);
                sb += g.increment(n + 4, j + 16);
            }
        a[s] = sa;
        b[s] = sb;
    }
    CHECK(std::abs(sample_correlation(a, b)) < 4.0 / std::sqrt(n_seeds));
}

TEST_CASE("shift: identity, constant offset, exact inverse") {
    GridSpec spec = GridSpec::make(1.0, 32, 0.25);
    NoiseGrid base = NoiseGrid::generate(spec, 11);

    NoiseGrid same = base.shifted(DriftShift::constant(spec, 0.0));
    CHECK(flatten(same) == flatten(base));

    const double k = 2.5;
    NoiseGrid up = base.shifted(DriftShift::constant(spec, k));
    for (int n = 0; n < spec.nt; ++n)
        for (int j = 0; j < spec.nx; ++j)
            CHECK(up.increment(n, j) ==
                  doctest::Approx(base.increment(n, j) + k * spec.cell_area()).epsilon(1e-12));

    // Arbitrary shift, then its negation: bit-exact restore.
    std::vector<double> h(spec.cells());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::sin(0.1 * i) * 3.0;
    std::vector<double> neg(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) neg[i] = -h[i];
    NoiseGrid round_trip = base.shifted(DriftShift::from_grid(spec, h))
                               .shifted(DriftShift::from_grid(spec, neg));
    CHECK(flatten(round_trip) == flatten(base));

    DriftShift wrong = DriftShift::constant(GridSpec::make(1.0, 16, 0.25), 1.0);
    CHECK_THROWS_AS(base.shifted(wrong), std::invalid_argument);
}

TEST_CASE("stochastic convolution: zero weight gives zero") {
    GridSpec spec = GridSpec::make(1.0, 32, 0.25);
    NoiseGrid g = NoiseGrid::generate(spec, 3);
    CHECK(stochastic_convolution(g, 0.0, spec.nt, 5) == 0.0);
}

TEST_CASE("stochastic convolution variance is t^2/4 before wrapping") {
    GridSpec spec = GridSpec::make(1.0, 64, 0.25);
    const int t_index = spec.nt;  // t = 0.25 <= J/2
    const double t = spec.t(t_index);
    const int n_seeds = 2000;
    std::vector<double> values(n_seeds);
    for (int s = 0; s < n_seeds; ++s)
        values[s] = stochastic_convolution(NoiseGrid::generate(spec, 40000 + s), 1.0,
                                           t_index, 17);
    const double want = t * t / 4.0;
    double got = sample_variance(values);
    CHECK(std::abs(got - want) < 3.0 * variance_std_error(values));
    CHECK(std::abs(sample_mean(values)) < 3.0 * mean_std_error(values));
}

TEST_CASE("stochastic convolution variance after wrapping matches quadrature") {
    GridSpec spec = GridSpec::make(1.0, 64, 0.75);
    const int t_index = spec.nt;  // t = 0.75 > J/2: the kernel overlaps itself
    const double t = spec.t(t_index);
    const double want = oracles::kernel_sq_spacetime(
        [&](double s, double y) { return circle_kernel(s, y, 1.0); }, t, 1.0, 1500, 1500);
    const int n_seeds = 2000;
    std::vector<double> values(n_seeds);
    for (int s = 0; s < n_seeds; ++s)
        values[s] = stochastic_convolution(NoiseGrid::generate(spec, 70000 + s), 1.0,
                                           t_index, 0);
    double got = sample_variance(values);
    // Monte Carlo band plus a small discretization allowance.
    CHECK(std::abs(got - want) < 3.0 * variance_std_error(values) + 0.02 * want);
    CHECK(want > t * t / 4.0);  // wrapping adds mass
}

TEST_CASE("coarsening sums fine increments with the right variance") {
    GridSpec fine = GridSpec::make(1.0, 256, 0.5);
    NoiseGrid fine_noise = NoiseGrid::generate(fine, 77);
    NoiseGrid coarse = NoiseGrid::coarsen(fine_noise, 2);
    CHECK(coarse.spec().nx == 128);
    CHECK(coarse.spec().nt == fine.nt / 2);
    // Exact sum per cell.
    double want = fine_noise.increment(4, 10) + fine_noise.increment(4, 11) +
                  fine_noise.increment(5, 10) + fine_noise.increment(5, 11);
    CHECK(coarse.increment(2, 5) == doctest::Approx(want).epsilon(1e-15));
    // Aggregated variance across the whole grid (16384 samples).
    std::vector<double> xs = flatten(coarse);
    CHECK(sample_variance(xs) == doctest::Approx(coarse.spec().cell_area()).epsilon(0.05));
    CHECK_THROWS_AS(NoiseGrid::coarsen(fine_noise, 3), std::invalid_argument);
}

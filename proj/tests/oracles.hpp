// Test-only oracles, kept independent of the implementation paths they
// check: direct summation and quadrature, a scalar RK4 integrator, exact
// fractional Brownian motion by circulant embedding, and a score-test
// enumeration for the binomial interval.

#ifndef STOCHWAVE_TESTS_ORACLES_HPP
#define STOCHWAVE_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace oracles {

/// Direct summation of the periodized kernel from its definition, with a
/// wide window.
inline double circle_kernel_direct(double t, double x, double J, int window = 64) {
    double sum = 0.0;
    for (int n = -window; n <= window; ++n)
        if (std::abs(x + n * J) <= t) sum += 0.5;
    return sum;
}

/// Midpoint quadrature of f over [a, b].
inline double quadrature(const std::function<double(double)>& f, double a, double b,
                         int n) {
    double h = (b - a) / n, sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f(a + (i + 0.5) * h);
    return sum * h;
}

/// Riemann sum of g(s,y)^2 over [0,t] x [0,J].
inline double kernel_sq_spacetime(const std::function<double(double, double)>& g,
                                  double t, double J, int ns, int ny) {
    double sum = 0.0;
    for (int a = 0; a < ns; ++a) {
        double s = (a + 0.5) * t / ns;
        for (int b = 0; b < ny; ++b) {
            double y = (b + 0.5) * J / ny;
            double v = g(s, y);
            sum += v * v;
        }
    }
    return sum * (t / ns) * (J / ny);
}

/// RK4 for y'' = f(y) with y(0)=y0, y'(0)=v0; returns y(t_end).
inline double rk4_second_order(const std::function<double(double)>& f, double y0,
                               double v0, double t_end, double dt) {
    double y = y0, v = v0;
    long long steps = static_cast<long long>(std::ceil(t_end / dt));
    double h = t_end / steps;
    for (long long i = 0; i < steps; ++i) {
        double k1y = v, k1v = f(y);
        double k2y = v + 0.5 * h * k1v, k2v = f(y + 0.5 * h * k1y);
        double k3y = v + 0.5 * h * k2v, k3v = f(y + 0.5 * h * k2y);
        double k4y = v + h * k3v, k4v = f(y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return y;
}

/// Exact fractional Gaussian noise of length m (unit-step increments of fBm
/// with Hurst index H) via Davies-Harte circulant embedding.
inline std::vector<double> fgn_davies_harte(int m, double hurst, std::uint64_t seed) {
    const int two_m = 2 * m;
    std::vector<double> cov(two_m);
    auto gamma = [hurst](double k) {
        return 0.5 * (std::pow(std::abs(k + 1), 2 * hurst) -
                      2.0 * std::pow(std::abs(k), 2 * hurst) +
                      std::pow(std::abs(k - 1), 2 * hurst));
    };
    for (int k = 0; k <= m; ++k) cov[k] = gamma(k);
    for (int k = 1; k < m; ++k) cov[two_m - k] = cov[k];

    std::vector<std::complex<double>> in(two_m), out(two_m);
    for (int k = 0; k < two_m; ++k) in[k] = cov[k];
    fftw_plan plan = fftw_plan_dft_1d(two_m, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> lambda(two_m);
    for (int k = 0; k < two_m; ++k) {
        lambda[k] = out[k].real();
        if (lambda[k] < -1e-9) throw std::runtime_error("circulant embedding not nonnegative");
        lambda[k] = std::max(lambda[k], 0.0);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> w(two_m);
    w[0] = std::sqrt(lambda[0] / two_m) * normal(rng);
    w[m] = std::sqrt(lambda[m] / two_m) * normal(rng);
    for (int k = 1; k < m; ++k) {
        double a = normal(rng), b = normal(rng);
        double s = std::sqrt(lambda[k] / (4.0 * m));
        w[k] = std::complex<double>(s * a, s * b);
        w[two_m - k] = std::conj(w[k]);
    }
    fftw_plan plan2 = fftw_plan_dft_1d(two_m, reinterpret_cast<fftw_complex*>(w.data()),
                                       reinterpret_cast<fftw_complex*>(in.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan2);
    fftw_destroy_plan(plan2);

    std::vector<double> fgn(m);
    for (int k = 0; k < m; ++k) fgn[k] = in[k].real();
    return fgn;
}

/// fBm path of length m+1 (B(0) = 0), unit time step per sample.
inline std::vector<double> fbm_path(int m, double hurst, std::uint64_t seed) {
    std::vector<double> fgn = fgn_davies_harte(m, hurst, seed);
    std::vector<double> path(m + 1, 0.0);
    for (int k = 0; k < m; ++k) path[k + 1] = path[k] + fgn[k];
    return path;
}

/// Score-test inversion of the binomial proportion interval by enumeration:
/// the set of p with |phat - p| <= z sqrt(p(1-p)/n), bracketed on a lattice.
inline std::pair<double, double> score_interval_scan(long long k, long long n,
                                                     double z, int grid = 200000) {
    const double phat = static_cast<double>(k) / n;
    double lo = 2.0, hi = -1.0;
    for (int i = 0; i <= grid; ++i) {
        double p = static_cast<double>(i) / grid;
        double d = phat - p;
        if (d * d <= z * z * p * (1.0 - p) / n) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
    }
    return {lo, hi};
}

}  // namespace oracles

#endif

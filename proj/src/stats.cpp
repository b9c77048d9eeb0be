#include "stochwave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochwave {

Interval wilson_interval(long long successes, long long trials, double z) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be positive");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes outside [0, trials]");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // Clamp away rounding residue so the interval always contains p-hat and
    // stays inside [0, 1].
    double lo = std::max(0.0, std::min((center - half) / denom, p));
    double hi = std::min(1.0, std::max((center + half) / denom, p));
    return Interval{lo, hi};
}

double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("sample_mean: empty");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: need at least 2 values");
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double mean_std_error(std::span<const double> xs) {
    return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double variance_std_error(std::span<const double> xs) {
    return sample_variance(xs) * std::sqrt(2.0 / static_cast<double>(xs.size() - 1));
}

double sample_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("sample_correlation: bad inputs");
    const double mx = sample_mean(xs), my = sample_mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

std::pair<double, double> ols_slope(std::span<const double> x,
                                    std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("ols_slope: bad inputs");
    const double mx = sample_mean(x), my = sample_mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    if (n == 2) return {slope, 0.0};
    double rss = 0.0;
    const double intercept = my - slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - intercept - slope * x[i];
        rss += r * r;
    }
    const double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return {slope, se};
}

}  // namespace stochwave

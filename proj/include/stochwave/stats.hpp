#ifndef STOCHWAVE_STATS_HPP
#define STOCHWAVE_STATS_HPP

#include <span>
#include <utility>

namespace stochwave {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion at confidence z
/// (default 95%).
Interval wilson_interval(long long successes, long long trials,
                         double z = 1.959963984540054);

double sample_mean(std::span<const double> xs);
/// Unbiased sample variance (n-1 denominator).
double sample_variance(std::span<const double> xs);
/// Standard error of the mean.
double mean_std_error(std::span<const double> xs);
/// Standard error of the sample variance under approximate normality,
/// s^2 sqrt(2/(n-1)).
double variance_std_error(std::span<const double> xs);
double sample_correlation(std::span<const double> xs, std::span<const double> ys);

/// Ordinary least squares y = a + b x; returns (slope, slope standard error).
std::pair<double, double> ols_slope(std::span<const double> x,
                                    std::span<const double> y);

}  // namespace stochwave

#endif

#ifndef STOCHWAVE_GIRSANOV_HPP
#define STOCHWAVE_GIRSANOV_HPP

#include <span>
#include <vector>

#include "stochwave/noise.hpp"
#include "stochwave/solver.hpp"

namespace stochwave {

/// Exponential-martingale weight of one path.
struct GirsanovWeight {
    double log_density = 0.0;
    double novikov_half_integral = 0.0;  // (1/2) sum h^2 dt dx
    double stop_time_used = 0.0;         // grid realization of T_m
};

/// Stopping budget: integrability bound m on the singular integral and the
/// horizon T.
struct StopSpec {
    double budget_m = 0.0;
    double horizon = 0.0;
};

/// Drift shift h(r) = r^(-alpha)/g(r) for r > 0, 0 at r = 0.
/// Throws std::domain_error for r < 0.
double drift_shift_h(double r, const ModelParams& params);

/// Log-density of the drift-removal change of measure along a recorded
/// (drift-free) path:
///   sum h(v(n,j)) W(n,j) - (1/2) sum h(v(n,j))^2 dt dx
/// over steps strictly before the grid realization of
/// T_m = tau ^ alpha_m ^ T.  h at step n pairs with the raw increment of
/// step n (Ito convention).  Throws when the history ends before the stop.
GirsanovWeight log_density(const FieldHistory& history, const NoiseGrid& noise,
                           const StopSpec& stop, const ModelParams& params);

/// Same with an arbitrary predictable shift grid over the first n_steps rows.
GirsanovWeight log_density(const NoiseGrid& noise, const DriftShift& shift,
                           int n_steps);

/// T_m realized on the grid: min of first hit time, first time the cumulative
/// singular integral exceeds the budget, and the horizon.
double stopped_horizon(const PathRecord& record, const StopSpec& stop,
                       const GridSpec& spec);

struct ReweightResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double effective_sample_size = 0.0;
    bool low_ess_warning = false;
};

/// Importance-sampling mean sum F_i exp(logw_i) / n with delta-method
/// standard error; estimates the shifted-measure expectation from unshifted
/// simulations.  Weights are exponentiated after a max-log shift.
ReweightResult reweight_estimate(std::span<const double> values,
                                 std::span<const GirsanovWeight> weights);

}  // namespace stochwave

#endif

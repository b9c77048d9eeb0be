#ifndef STOCHWAVE_SOLVER_HPP
#define STOCHWAVE_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "stochwave/circle_kernel.hpp"
#include "stochwave/grid.hpp"
#include "stochwave/noise.hpp"

namespace stochwave {

/// Diffusion coefficient g with its declared bounds 0 < c_g <= g <= C_g and
/// Lipschitz constant.
struct Diffusion {
    std::function<double(double)> fn;
    double lower = 1.0;     // c_g
    double upper = 1.0;     // C_g
    double lipschitz = 0.0; // L_g

    double operator()(double y) const { return fn(y); }
    static Diffusion constant(double value);
    /// g(y) = base + amp*cos(y); requires base - |amp| > 0.
    static Diffusion bounded_cosine(double base, double amp);
};

struct ModelParams {
    double alpha = 0.5;
    Diffusion g = Diffusion::constant(1.0);
    long long trunc_level = 1000000;  // N; drift floor 1/N
    bool drift_enabled = true;

    double floor() const { return 1.0 / static_cast<double>(trunc_level); }
    /// Spot-checks the diffusion bounds on a 1000-point lattice and the
    /// basic parameter ranges.  Throws std::invalid_argument on violation.
    void validate() const;
};

/// Marching state: two consecutive time slices.  Once `dead` is set the
/// state never updates again (absorbing cemetery).
struct PathState {
    std::vector<double> prev;  // slice step_index - 1
    std::vector<double> curr;  // slice step_index
    int step_index = 0;
    bool dead = false;
};

/// Full field history of one path, slice-major.
struct FieldHistory {
    GridSpec spec;
    std::vector<double> values;  // (steps_stored+1) x nx
    int steps_stored = 0;        // last stored slice index

    double at(int n, int j) const {
        return values[static_cast<std::size_t>(n) * spec.nx + j];
    }
    const double* slice(int n) const {
        return values.data() + static_cast<std::size_t>(n) * spec.nx;
    }
    double slice_min(int n) const;
};

/// Per-path outcome.
struct PathRecord {
    std::uint64_t seed = 0;
    double alpha = 0.0;
    bool hit = false;
    bool invalid = false;
    double tau_hat = std::numeric_limits<double>::infinity();
    /// First grid time with min-field <= 1/N, for the configured ladder of N.
    std::vector<std::pair<long long, double>> tau_n_hats;
    std::vector<double> minima;          // per stored slice
    std::vector<double> singular_trace;  // cumulative sum dt*dx*(u v 1/N)^(-2a)
    double singular_integral = 0.0;
    double log_weight = 0.0;  // filled by the measure-change accumulator

    double min_over_run() const;
    /// First grid time with min-field <= 1/n, from the minima trace.
    double tau_n_hat(long long n, const GridSpec& spec) const;
};

struct RunOptions {
    double hit_level = 0.0;
    bool stop_on_hit = true;
    bool keep_history = false;
    /// When > 0, accumulate the drift-removal log-density along the run,
    /// stopping the accumulation at tau ^ alpha_m ^ T.
    double girsanov_budget = 0.0;
    std::vector<long long> tau_ladder = {10, 100, 1000, 10000, 100000, 1000000};
};

struct RunOutput {
    PathRecord record;
    std::optional<FieldHistory> history;
};

/// Second-order start: u^1 from the initial data, the half-weight first
/// noise row and the half drift kick.
PathState first_step_init(const InitialData& init, const ModelParams& params,
                          const GridSpec& spec, const NoiseGrid& noise);

/// One leapfrog update at unit CFL,
///   u^{n+1}_j = u^n_{j+1} + u^n_{j-1} - u^{n-1}_j
///             + dt^2 [u^n_j v 1/N]^(-alpha)  (when drift is enabled)
///             + dt^2 g(u^n_j) Whalf(n,j) / (dt dx),
/// where Whalf(n,j) = (W(n,j) + W(n-1,j))/2 averages the two slabs adjacent
/// to the step.  With that average the response to a unit increment is
/// exactly the sampled kernel (1/2 on the strict backward cone), which makes
/// the noise variance identities and the cone locality of the scheme exact.
/// Throws std::logic_error when stepping a dead state.
PathState step(PathState state, const ModelParams& params, const NoiseGrid& noise,
               const GridSpec& spec);

/// Marches a path to the horizon or to the first slice whose minimum is at
/// or below hit_level.  Records the minima trace, the cumulative singular
/// integral over slices strictly before the stop, and (optionally the full
/// history and) the drift-removal log-weight.
RunOutput run_path(const ModelParams& params, const InitialData& init,
                   const GridSpec& spec, const NoiseGrid& noise,
                   const RunOptions& options = {});

/// Convenience: fresh noise from the seed.
RunOutput run_path(const ModelParams& params, const InitialData& init,
                   const GridSpec& spec, std::uint64_t seed,
                   const RunOptions& options = {});

}  // namespace stochwave

#endif

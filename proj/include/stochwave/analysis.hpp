#ifndef STOCHWAVE_ANALYSIS_HPP
#define STOCHWAVE_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stochwave/circle_kernel.hpp"
#include "stochwave/noise.hpp"
#include "stochwave/solver.hpp"

namespace stochwave {

enum class Direction { time, space, joint };

struct HolderEstimate {
    double beta_hat = 0.0;
    double std_error = 0.0;
    std::vector<int> lags_used;  // in cells
    Direction direction = Direction::space;
    /// Empirical constant: max |increment| / lag^beta_hat over the pool.
    double y_constant = 0.0;
};

/// Log-log regression of the pooled p-th moment of increments against the
/// lag, slope divided by p.  Lags are grid lags (cells); each must be >= 2
/// and at most an eighth of the extent.  Requires at least 4 valid lags.
HolderEstimate holder_estimate(std::span<const FieldHistory* const> fields,
                               Direction direction, std::span<const int> lags,
                               int moment_p);
HolderEstimate holder_estimate(const FieldHistory& field, Direction direction,
                               std::span<const int> lags, int moment_p);
/// 1-D series variant (time direction), used against scalar-process oracles.
HolderEstimate holder_estimate_series(std::span<const double> series,
                                      double sample_step,
                                      std::span<const int> lags, int moment_p);
/// Log-spaced lags in [2, extent/8].
std::vector<int> default_lags(int extent);

struct DriftIntegral {
    double value = 0.0;
    std::int64_t floored_cells = 0;  // cells where the truncated value was used
};

/// Cone integral of the (truncated) singular drift,
///   sum over cone members of (u v 1/N)^(-alpha) dt dx,
/// with unwrapped multiplicity.  This is the plain integral over L(t,x); the
/// Duhamel response of the scheme is half of it.  Throws when the apex lies
/// outside the recorded history.
DriftIntegral drift_integral(const FieldHistory& history, int apex_step,
                             int apex_x, const ModelParams& params);

/// Duhamel split of a recorded field: deterministic wave part, drift part
/// (half cone integral) and stochastic convolution with rho = g(u), sampled
/// on a strided sub-lattice.
struct DriftDecomposition {
    std::vector<int> t_steps;
    std::vector<int> x_indices;
    /// Row-major over (t_steps, x_indices).
    std::vector<double> deterministic;  // V
    std::vector<double> drift;          // D (Duhamel-normalized)
    std::vector<double> noise_part;     // N
    std::vector<double> field;          // solver values at the same points

    double closure_sup() const;  // max |field - (V + D + N)|
};

DriftDecomposition decompose(const FieldHistory& history, const NoiseGrid& noise,
                             const ModelParams& params, const InitialData& init,
                             int stride_t, int stride_x);

struct ConeMonotonicityReport {
    int samples = 0;
    int violations = 0;
    bool vacuous = false;  // interior set was empty
};

/// Verifies drift_integral(interior) < drift_integral(apex) on randomly
/// sampled interior grid points of the apex cone (strict-subset geometry of
/// nested cones).
ConeMonotonicityReport cone_monotonicity_check(const FieldHistory& history,
                                               int apex_step, int apex_x,
                                               const ModelParams& params,
                                               int n_samples, std::uint64_t seed);

struct SectorRow {
    double radius = 0.0;
    double bound_rhs = 0.0;       // Y R^(1/2-e) (1 - pi Y^(-1-a) 2^-(a+2) R^exponent)
    bool forces_negative = false;
    int arc_points = 0;
    double max_field_on_arc = 0.0;
    double max_vn_increment = 0.0;  // max empirical Delta(V+N) on the arc
    double annulus_drift = 0.0;     // cone-annulus mass at the arc (no 1/2)
};

struct SectorReport {
    double delta = 0.0;
    double epsilon = 0.0;
    double tau_delta = 0.0;
    int tau_delta_step = 0;
    int x_delta_index = 0;
    double holder_constant = 0.0;  // Y used for the bound
    double r_star = 0.0;           // closed-form radius where the bound crosses 0
    std::vector<SectorRow> rows;
};

/// Boundary-sector diagnostic for the no-hitting regime: locates the first
/// delta-crossing, measures the empirical increments and cone-annulus drift
/// on arcs of a radius ladder, and evaluates the upper bound whose sign flip
/// at r_star certifies that the drift overwhelms the modulus of continuity.
/// Requires alpha > 3 and (3-alpha)/2 + epsilon(alpha+1) < 0; throws
/// otherwise, and throws when the field never crosses delta.
SectorReport sector_diagnostic(const FieldHistory& history,
                               const ModelParams& params, double delta,
                               double epsilon,
                               std::optional<double> holder_constant = {});

struct DyadicCount {
    int level = 0;          // n
    double lambda = 0.0;    // 2^(-(1-2 eps) n)
    std::int64_t lattice_points = 0;
    std::int64_t count = 0;  // lattice points with v <= 2^-n K
};

struct DyadicReport {
    double k_bound = 0.0;
    double epsilon = 0.0;
    bool k_too_small = false;  // K below the field sup
    int capped_at = -1;        // first level dropped because lambda < dt
    std::vector<DyadicCount> counts;
    /// sum 2^(2a(n+1)) K^(-2a) count_n lambda_n^2
    double weighted_tail = 0.0;
};

/// Counts near-zero excursions on dyadic lattices with spacing lambda_n
/// (time) by 2 lambda_n (space), anchored at the origin and restricted to
/// pre-hit times, and accumulates the weighted tail sum that mirrors the
/// singular-integral bound.
DyadicReport dyadic_counts(const FieldHistory& history, double k_bound,
                           double epsilon, int max_level, double alpha);

/// Spatial mean process V(t_n) = sum_j u(n, x_j) dx for every stored slice.
std::vector<double> mean_process(const FieldHistory& history);

}  // namespace stochwave

#endif

#include "stochwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "stochwave/stats.hpp"

namespace stochwave {

namespace {

double circle_distance(double a, double b, double circle_length) {
    double d = CircleCoord::reduce(a - b, circle_length).value;
    return std::min(d, circle_length - d);
}

struct MomentAccumulator {
    double sum_pow = 0.0;
    double max_abs = 0.0;
    std::int64_t count = 0;

    void add(double diff, int p) {
        double a = std::abs(diff);
        sum_pow += std::pow(a, p);
        max_abs = std::max(max_abs, a);
        ++count;
    }
};

}  // namespace

std::vector<int> default_lags(int extent) {
    std::vector<int> lags;
    int max_lag = extent / 8;
    for (double v = 2.0; v <= max_lag; v *= 1.4142135623730951) {
        int lag = static_cast<int>(std::lround(v));
        if (lags.empty() || lag > lags.back()) lags.push_back(lag);
    }
    return lags;
}

HolderEstimate holder_estimate(std::span<const FieldHistory* const> fields,
                               Direction direction, std::span<const int> lags,
                               int moment_p) {
    if (fields.empty()) throw std::invalid_argument("holder_estimate: no fields");
    if (moment_p < 1) throw std::invalid_argument("holder_estimate: moment must be >= 1");
    const GridSpec& spec = fields[0]->spec;
    int steps = fields[0]->steps_stored;
    for (const FieldHistory* f : fields) {
        if (!(f->spec == spec)) throw std::invalid_argument("holder_estimate: mixed grids");
        steps = std::min(steps, f->steps_stored);
    }
    const int extent = direction == Direction::space ? spec.nx
                       : direction == Direction::time ? steps
                                                      : std::min(spec.nx, steps);

    std::vector<int> valid;
    for (int lag : lags)
        if (lag >= 2 && lag <= extent / 8 && (valid.empty() || lag > valid.back()))
            valid.push_back(lag);
    if (valid.size() < 4)
        throw std::invalid_argument("holder_estimate: fewer than 4 valid lags");

    std::vector<MomentAccumulator> acc(valid.size());
    for (const FieldHistory* f : fields) {
        for (std::size_t li = 0; li < valid.size(); ++li) {
            const int lag = valid[li];
            if (direction == Direction::space) {
                for (int n = 0; n <= steps; ++n) {
                    const double* u = f->slice(n);
                    for (int j = 0; j < spec.nx; ++j)
                        acc[li].add(u[spec.wrap(j + lag)] - u[j], moment_p);
                }
            } else if (direction == Direction::time) {
                for (int n = 0; n + lag <= steps; ++n) {
                    const double* a = f->slice(n);
                    const double* b = f->slice(n + lag);
                    for (int j = 0; j < spec.nx; ++j) acc[li].add(b[j] - a[j], moment_p);
                }
            } else {
                for (int n = 0; n + lag <= steps; ++n) {
                    const double* a = f->slice(n);
                    const double* b = f->slice(n + lag);
                    for (int j = 0; j < spec.nx; ++j)
                        acc[li].add(b[spec.wrap(j + lag)] - a[j], moment_p);
                }
            }
        }
    }

    std::vector<double> log_lag(valid.size()), log_moment(valid.size());
    for (std::size_t li = 0; li < valid.size(); ++li) {
        log_lag[li] = std::log(valid[li] * spec.dx());
        log_moment[li] = std::log(acc[li].sum_pow / acc[li].count);
    }
    auto [slope, slope_se] = ols_slope(log_lag, log_moment);

    HolderEstimate est;
    est.direction = direction;
    est.lags_used = valid;
    est.beta_hat = slope / moment_p;
    est.std_error = slope_se / moment_p;
    double y = 0.0;
    for (std::size_t li = 0; li < valid.size(); ++li) {
        double lag_phys = valid[li] * spec.dx();
        double denom = std::pow(lag_phys, est.beta_hat);
        if (direction == Direction::joint) denom *= 2.0;
        y = std::max(y, acc[li].max_abs / denom);
    }
    est.y_constant = y;
    return est;
}

HolderEstimate holder_estimate(const FieldHistory& field, Direction direction,
                               std::span<const int> lags, int moment_p) {
    const FieldHistory* ptr = &field;
    return holder_estimate(std::span<const FieldHistory* const>(&ptr, 1), direction,
                           lags, moment_p);
}

HolderEstimate holder_estimate_series(std::span<const double> series,
                                      double sample_step,
                                      std::span<const int> lags, int moment_p) {
    if (moment_p < 1) throw std::invalid_argument("holder_estimate: moment must be >= 1");
    const int n = static_cast<int>(series.size());
    std::vector<int> valid;
    for (int lag : lags)
        if (lag >= 2 && lag <= n / 8 && (valid.empty() || lag > valid.back()))
            valid.push_back(lag);
    if (valid.size() < 4)
        throw std::invalid_argument("holder_estimate: fewer than 4 valid lags");

    std::vector<MomentAccumulator> acc(valid.size());
    for (std::size_t li = 0; li < valid.size(); ++li)
        for (int i = 0; i + valid[li] < n; ++i)
            acc[li].add(series[i + valid[li]] - series[i], moment_p);

    std::vector<double> log_lag(valid.size()), log_moment(valid.size());
    for (std::size_t li = 0; li < valid.size(); ++li) {
        log_lag[li] = std::log(valid[li] * sample_step);
        log_moment[li] = std::log(acc[li].sum_pow / acc[li].count);
    }
    auto [slope, slope_se] = ols_slope(log_lag, log_moment);
    HolderEstimate est;
    est.direction = Direction::time;
    est.lags_used = valid;
    est.beta_hat = slope / moment_p;
    est.std_error = slope_se / moment_p;
    for (std::size_t li = 0; li < valid.size(); ++li)
        est.y_constant = std::max(
            est.y_constant,
            acc[li].max_abs / std::pow(valid[li] * sample_step, est.beta_hat));
    return est;
}

DriftIntegral drift_integral(const FieldHistory& history, int apex_step,
                             int apex_x, const ModelParams& params) {
    const GridSpec& spec = history.spec;
    if (apex_step < 0 || apex_step > history.steps_stored)
        throw std::invalid_argument("drift_integral: apex outside the recorded history");
    if (apex_x < 0 || apex_x >= spec.nx)
        throw std::invalid_argument("drift_integral: apex index outside the grid");
    const double fl = params.floor();
    DriftIntegral out;
    double sum = 0.0;
    for (int n = 0; n < apex_step; ++n) {
        const double* u = history.slice(n);
        const int reach = apex_step - n - 1;  // max |unwrapped offset|
        for (int l = -reach; l <= reach; ++l) {
            double v = u[spec.wrap(apex_x + l)];
            if (v < fl) ++out.floored_cells;
            sum += std::pow(std::max(v, fl), -params.alpha);
        }
    }
    out.value = sum * spec.cell_area();
    return out;
}

DriftDecomposition decompose(const FieldHistory& history, const NoiseGrid& noise,
                             const ModelParams& params, const InitialData& init,
                             int stride_t, int stride_x) {
    const GridSpec& spec = history.spec;
    if (!(noise.spec() == spec))
        throw std::invalid_argument("decompose: noise and history grids differ");
    if (stride_t < 1 || stride_x < 1)
        throw std::invalid_argument("decompose: strides must be >= 1");

    DriftDecomposition out;
    for (int n = 0; n <= history.steps_stored; n += stride_t) out.t_steps.push_back(n);
    for (int j = 0; j < spec.nx; j += stride_x) out.x_indices.push_back(j);

    // Weight grid for the stochastic part: rho(n, j) = g(u(n, j)).
    std::vector<double> rho(static_cast<std::size_t>(history.steps_stored) * spec.nx);
    for (int n = 0; n < history.steps_stored; ++n) {
        const double* u = history.slice(n);
        for (int j = 0; j < spec.nx; ++j)
            rho[static_cast<std::size_t>(n) * spec.nx + j] = params.g(u[j]);
    }

    for (int n : out.t_steps)
        for (int j : out.x_indices) {
            out.deterministic.push_back(dalembert(init, spec, n, j));
            // Duhamel normalization: the kernel carries a factor 1/2, so the
            // scheme's drift response is half the plain cone integral.
            out.drift.push_back(params.drift_enabled
                                    ? 0.5 * drift_integral(history, n, j, params).value
                                    : 0.0);
            out.noise_part.push_back(stochastic_convolution(noise, rho, n, j));
            out.field.push_back(history.at(n, j));
        }
    return out;
}

double DriftDecomposition::closure_sup() const {
    double sup = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i)
        sup = std::max(sup, std::abs(field[i] - (deterministic[i] + drift[i] + noise_part[i])));
    return sup;
}

ConeMonotonicityReport cone_monotonicity_check(const FieldHistory& history,
                                               int apex_step, int apex_x,
                                               const ModelParams& params,
                                               int n_samples, std::uint64_t seed) {
    const GridSpec& spec = history.spec;
    ConeMonotonicityReport report;
    // Interior grid points strictly inside the cone with s > 0; an apex one
    // step above the initial slice has none.
    std::vector<std::pair<int, int>> interior;
    const double apex_pos = spec.x(apex_x);
    const double guard = 1e-9 * spec.dx();  // keep exact-boundary nodes out
    for (int n = 1; n < apex_step; ++n) {
        const double reach = (apex_step - n) * spec.dt() - guard;
        for (int j = 0; j < spec.nx; ++j)
            if (circle_distance(apex_pos, spec.x(j), spec.circle_length) < reach)
                interior.emplace_back(n, j);
    }
    if (interior.empty()) {
        report.vacuous = true;
        return report;
    }
    const double apex_value = drift_integral(history, apex_step, apex_x, params).value;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    for (int s = 0; s < n_samples; ++s) {
        auto [n, j] = interior[pick(rng)];
        double v = drift_integral(history, n, j, params).value;
        ++report.samples;
        if (!(v < apex_value)) ++report.violations;
    }
    return report;
}

SectorReport sector_diagnostic(const FieldHistory& history,
                               const ModelParams& params, double delta,
                               double epsilon,
                               std::optional<double> holder_constant) {
    const GridSpec& spec = history.spec;
    if (!(params.alpha > 3.0))
        throw std::invalid_argument(
            "sector_diagnostic: requires alpha > 3 (the bound exponent "
            "(3-alpha)/2 + eps(alpha+1) cannot be negative otherwise)");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("sector_diagnostic: epsilon must lie in (0, 1/2)");
    const double exponent = 0.5 * (3.0 - params.alpha) + epsilon * (params.alpha + 1.0);
    if (!(exponent < 0.0))
        throw std::invalid_argument(
            "sector_diagnostic: epsilon too large; need (3-alpha)/2 + eps(alpha+1) < 0");
    if (!(delta > 0.0)) throw std::invalid_argument("sector_diagnostic: delta must be positive");

    SectorReport report;
    report.delta = delta;
    report.epsilon = epsilon;

    int cross = -1;
    for (int n = 0; n <= history.steps_stored; ++n)
        if (history.slice_min(n) < delta) {
            cross = n;
            break;
        }
    if (cross < 0)
        throw std::runtime_error("sector_diagnostic: the field never crosses delta");
    report.tau_delta_step = cross;
    report.tau_delta = spec.t(cross);
    const double* slice = history.slice(cross);
    int argmin = 0;
    for (int j = 1; j < spec.nx; ++j)
        if (slice[j] < slice[argmin]) argmin = j;  // ties keep the smallest index
    report.x_delta_index = argmin;

    const double apex_t = report.tau_delta;
    const double apex_x = spec.x(argmin);
    const double beta = 0.5 - epsilon;

    // Radius ladder inside the cone and below half the circle.
    const double r_hi = 0.9 * std::min(apex_t, 0.5 * spec.circle_length);
    const double r_lo = 2.0 * spec.dx();
    if (!(r_hi > r_lo))
        throw std::runtime_error("sector_diagnostic: crossing too early for a radius ladder");
    constexpr int kLadder = 8;
    constexpr int kArc = 9;
    std::vector<double> radii(kLadder);
    for (int i = 0; i < kLadder; ++i)
        radii[i] = r_lo * std::pow(r_hi / r_lo, i / double(kLadder - 1));

    const double apex_drift = drift_integral(history, cross, argmin, params).value;
    const double u_apex = history.at(cross, argmin);

    struct ArcPoint {
        double dist;
        double du;
        double d_annulus;
    };
    std::vector<std::vector<ArcPoint>> arcs(kLadder);
    double y_fit = 0.0;
    for (int ri = 0; ri < kLadder; ++ri) {
        const double R = radii[ri];
        std::set<std::pair<int, int>> seen;
        for (int ai = 0; ai < kArc; ++ai) {
            // Directions strictly inside the backward wedge |dx| < dt.
            double phi = (-0.25 + 0.5 * (ai + 0.5) / kArc) * std::numbers::pi;
            double t = apex_t - R * std::cos(phi);
            double x = apex_x + R * std::sin(phi);
            int n = static_cast<int>(std::lround(t / spec.dt()));
            int j = spec.wrap(static_cast<int>(std::lround(x / spec.dx() - 0.5)));
            if (n < 0 || n >= cross) continue;
            double dist_t = apex_t - spec.t(n);
            double dist_x = circle_distance(apex_x, spec.x(j), spec.circle_length);
            if (!(dist_x < dist_t)) continue;  // snapped outside the cone
            if (!seen.insert({n, j}).second) continue;
            ArcPoint pt;
            pt.dist = std::hypot(dist_t, dist_x);
            double annulus = apex_drift - drift_integral(history, n, j, params).value;
            pt.d_annulus = annulus;
            // Empirical Delta(V+N) = Delta u - Delta D with the Duhamel 1/2.
            pt.du = (history.at(n, j) - u_apex) + 0.5 * annulus;
            arcs[ri].push_back(pt);
            if (pt.dist > 0.0)
                y_fit = std::max(y_fit, std::abs(pt.du) / std::pow(pt.dist, beta));
        }
    }
    report.holder_constant = holder_constant.value_or(y_fit);
    const double y = report.holder_constant;
    if (!(y > 0.0))
        throw std::runtime_error("sector_diagnostic: empty arcs, no Holder constant");

    const double coef = std::numbers::pi * std::pow(y, -1.0 - params.alpha) /
                        std::pow(2.0, params.alpha + 2.0);
    report.r_star = std::pow(std::pow(2.0, params.alpha + 2.0) *
                                 std::pow(y, 1.0 + params.alpha) / std::numbers::pi,
                             1.0 / exponent);
    for (int ri = 0; ri < kLadder; ++ri) {
        SectorRow row;
        row.radius = radii[ri];
        row.bound_rhs = y * std::pow(radii[ri], beta) *
                        (1.0 - coef * std::pow(radii[ri], exponent));
        row.forces_negative = row.bound_rhs < 0.0;
        row.arc_points = static_cast<int>(arcs[ri].size());
        double max_field = -std::numeric_limits<double>::infinity();
        double max_vn = -std::numeric_limits<double>::infinity();
        double mean_annulus = 0.0;
        for (const ArcPoint& pt : arcs[ri]) {
            max_field = std::max(max_field, pt.du - 0.5 * pt.d_annulus + u_apex);
            max_vn = std::max(max_vn, pt.du);
            mean_annulus += pt.d_annulus;
        }
        if (!arcs[ri].empty()) mean_annulus /= arcs[ri].size();
        row.max_field_on_arc = arcs[ri].empty() ? 0.0 : max_field;
        row.max_vn_increment = arcs[ri].empty() ? 0.0 : max_vn;
        row.annulus_drift = mean_annulus;
        report.rows.push_back(row);
    }
    return report;
}

DyadicReport dyadic_counts(const FieldHistory& history, double k_bound,
                           double epsilon, int max_level, double alpha) {
    const GridSpec& spec = history.spec;
    if (!(k_bound > 0.0)) throw std::invalid_argument("dyadic_counts: K must be positive");
    if (!(epsilon > 0.0 && 2.0 * epsilon < 1.0))
        throw std::invalid_argument("dyadic_counts: need 0 < 2 eps < 1");

    // For the finiteness diagnostic at alpha < 1 the lattice exponent must
    // satisfy 0 < 2 eps < 1 - alpha, or the weighted tail is not expected to
    // converge.
    if (alpha < 1.0 && !(2.0 * epsilon < 1.0 - alpha))
        throw std::invalid_argument("dyadic_counts: need 2 eps < 1 - alpha");

    DyadicReport report;
    report.k_bound = k_bound;
    report.epsilon = epsilon;

    double sup = -std::numeric_limits<double>::infinity();
    int hit_step = history.steps_stored;
    for (int n = 0; n <= history.steps_stored; ++n) {
        const double* u = history.slice(n);
        for (int j = 0; j < spec.nx; ++j) sup = std::max(sup, u[j]);
        if (history.slice_min(n) <= 0.0) {
            hit_step = n;
            break;
        }
    }
    report.k_too_small = sup > k_bound;

    const double dt = spec.dt();
    const double two_alpha = 2.0 * alpha;
    for (int n = 0; n <= max_level; ++n) {
        const double lambda = std::pow(2.0, -(1.0 - 2.0 * epsilon) * n);
        if (lambda < dt) {
            report.capped_at = n;
            break;
        }
        const double threshold = std::pow(2.0, -n) * k_bound;
        DyadicCount row;
        row.level = n;
        row.lambda = lambda;
        for (int k = 0;; ++k) {
            const double t = k * lambda;
            const int t_idx = static_cast<int>(std::lround(t / dt));
            if (t_idx > hit_step || t > spec.horizon()) break;
            const double* u = history.slice(t_idx);
            for (int l = 0;; ++l) {
                const double x = 2.0 * l * lambda;
                if (x >= spec.circle_length) break;
                const int j = spec.wrap(static_cast<int>(std::lround(x / spec.dx() - 0.5)));
                ++row.lattice_points;
                if (u[j] <= threshold) ++row.count;
            }
        }
        report.weighted_tail += std::pow(2.0, two_alpha * (n + 1)) *
                                std::pow(k_bound, -two_alpha) * row.count * lambda * lambda;
        report.counts.push_back(row);
    }
    return report;
}

std::vector<double> mean_process(const FieldHistory& history) {
    const GridSpec& spec = history.spec;
    std::vector<double> v(history.steps_stored + 1);
    for (int n = 0; n <= history.steps_stored; ++n) {
        const double* u = history.slice(n);
        double sum = 0.0;
        for (int j = 0; j < spec.nx; ++j) sum += u[j];
        v[n] = sum * spec.dx();
    }
    return v;
}

}  // namespace stochwave

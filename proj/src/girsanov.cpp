#include "stochwave/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochwave {

double drift_shift_h(double r, const ModelParams& params) {
    if (r < 0.0) throw std::domain_error("drift_shift_h: negative field value");
    if (r == 0.0) return 0.0;
    return std::pow(r, -params.alpha) / params.g(r);
}

namespace {

/// Stop step s* such that rows 0..s*-1 enter the density: the first hit
/// slice, the slab whose inclusion pushes the singular integral past the
/// budget, or the horizon, whichever is first.  Throws when the recorded
/// history ends before any stop is realized.
int stop_step(const FieldHistory& history, const StopSpec& stop,
              const ModelParams& params, double hit_level) {
    const GridSpec& spec = history.spec;
    const int horizon_step = static_cast<int>(std::llround(stop.horizon / spec.dt()));
    double singular = 0.0;
    for (int n = 0; n <= history.steps_stored; ++n) {
        if (history.slice_min(n) <= hit_level) return n;
        if (n >= horizon_step) return horizon_step;
        const double* u = history.slice(n);
        double acc = 0.0;
        for (int j = 0; j < spec.nx; ++j)
            acc += std::pow(std::max(u[j], params.floor()), -2.0 * params.alpha);
        singular += acc * spec.cell_area();
        if (stop.budget_m > 0.0 && singular > stop.budget_m) return n;
    }
    throw std::invalid_argument("log_density: history shorter than the stop");
}

}  // namespace

GirsanovWeight log_density(const FieldHistory& history, const NoiseGrid& noise,
                           const StopSpec& stop, const ModelParams& params) {
    const GridSpec& spec = history.spec;
    if (!(noise.spec() == spec))
        throw std::invalid_argument("log_density: noise and history grids differ");
    if (!(stop.horizon > 0.0)) throw std::invalid_argument("log_density: horizon must be positive");

    const int s = stop_step(history, stop, params, 0.0);
    const double area = spec.cell_area();
    GirsanovWeight w;
    w.stop_time_used = spec.t(s);
    for (int n = 0; n < s; ++n) {
        const double* u = history.slice(n);
        for (int j = 0; j < spec.nx; ++j) {
            double h = drift_shift_h(std::max(u[j], 0.0), params);
            if (h == 0.0) continue;
            w.log_density += h * noise.increment(n, j);
            w.novikov_half_integral += 0.5 * h * h * area;
        }
    }
    w.log_density -= w.novikov_half_integral;
    return w;
}

GirsanovWeight log_density(const NoiseGrid& noise, const DriftShift& shift,
                           int n_steps) {
    const GridSpec& spec = noise.spec();
    if (!(shift.spec == spec))
        throw std::invalid_argument("log_density: shift and noise grids differ");
    if (n_steps < 0 || n_steps > spec.nt)
        throw std::invalid_argument("log_density: step count outside the grid");
    const double area = spec.cell_area();
    GirsanovWeight w;
    w.stop_time_used = spec.t(n_steps);
    for (int n = 0; n < n_steps; ++n)
        for (int j = 0; j < spec.nx; ++j) {
            double h = shift.at(n, j);
            if (h == 0.0) continue;
            w.log_density += h * noise.increment(n, j);
            w.novikov_half_integral += 0.5 * h * h * area;
        }
    w.log_density -= w.novikov_half_integral;
    return w;
}

double stopped_horizon(const PathRecord& record, const StopSpec& stop,
                       const GridSpec& spec) {
    double t = stop.horizon;
    if (record.hit) t = std::min(t, record.tau_hat);
    if (stop.budget_m > 0.0) {
        for (std::size_t n = 0; n < record.singular_trace.size(); ++n) {
            if (record.singular_trace[n] > stop.budget_m) {
                t = std::min(t, spec.t(static_cast<int>(n) + 1));
                break;
            }
        }
    }
    return t;
}

ReweightResult reweight_estimate(std::span<const double> values,
                                 std::span<const GirsanovWeight> weights) {
    if (values.size() != weights.size() || values.empty())
        throw std::invalid_argument("reweight_estimate: mismatched or empty inputs");
    const std::size_t n = values.size();
    double max_log = weights[0].log_density;
    for (const auto& w : weights) max_log = std::max(max_log, w.log_density);

    // Work with exp(logw - max) and undo the shift on the ratio scale.
    std::vector<double> omega(n);
    double sum_w = 0.0, sum_w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        omega[i] = std::exp(weights[i].log_density - max_log);
        sum_w += omega[i];
        sum_w2 += omega[i] * omega[i];
    }
    ReweightResult r;
    r.effective_sample_size = sum_w * sum_w / sum_w2;
    r.low_ess_warning = r.effective_sample_size < 10.0;

    const double scale = std::exp(max_log);
    double mean_fw = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_fw += values[i] * omega[i];
    mean_fw /= static_cast<double>(n);
    r.estimate = scale * mean_fw;

    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = values[i] * omega[i] - mean_fw;
        var += d * d;
    }
    var /= n > 1 ? static_cast<double>(n - 1) : 1.0;
    r.std_error = scale * std::sqrt(var / static_cast<double>(n));
    return r;
}

}  // namespace stochwave

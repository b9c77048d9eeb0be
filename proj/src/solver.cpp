#include "stochwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochwave {

Diffusion Diffusion::constant(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("diffusion must be positive");
    Diffusion d;
    d.fn = [value](double) { return value; };
    d.lower = value;
    d.upper = value;
    d.lipschitz = 0.0;
    return d;
}

Diffusion Diffusion::bounded_cosine(double base, double amp) {
    if (!(base - std::abs(amp) > 0.0))
        throw std::invalid_argument("bounded_cosine: lower bound not positive");
    Diffusion d;
    d.fn = [base, amp](double y) { return base + amp * std::cos(y); };
    d.lower = base - std::abs(amp);
    d.upper = base + std::abs(amp);
    d.lipschitz = std::abs(amp);
    return d;
}

void ModelParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (trunc_level < 1) throw std::invalid_argument("truncation level must be >= 1");
    if (!(g.lower > 0.0) || !(g.lower <= g.upper))
        throw std::invalid_argument("diffusion bounds must satisfy 0 < c_g <= C_g");
    for (int i = 0; i < 1000; ++i) {
        double y = -50.0 + 100.0 * i / 999.0;
        double v = g(y);
        if (!(v >= g.lower) || !(v <= g.upper))
            throw std::invalid_argument("diffusion leaves its declared bounds");
    }
}

double FieldHistory::slice_min(int n) const {
    const double* s = slice(n);
    return *std::min_element(s, s + spec.nx);
}

double PathRecord::min_over_run() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : minima) m = std::min(m, v);
    return m;
}

double PathRecord::tau_n_hat(long long n, const GridSpec& spec) const {
    const double level = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < minima.size(); ++k)
        if (minima[k] <= level) return spec.t(static_cast<int>(k));
    return std::numeric_limits<double>::infinity();
}

namespace {

inline double drift_term(double u, const ModelParams& params) {
    return std::pow(std::max(u, params.floor()), -params.alpha);
}

inline double singular_slice(const double* u, const GridSpec& spec,
                             const ModelParams& params) {
    double acc = 0.0;
    for (int j = 0; j < spec.nx; ++j)
        acc += std::pow(std::max(u[j], params.floor()), -2.0 * params.alpha);
    return acc * spec.cell_area();
}

}  // namespace

PathState first_step_init(const InitialData& init, const ModelParams& params,
                          const GridSpec& spec, const NoiseGrid& noise) {
    const int nx = spec.nx;
    const double dt = spec.dt();
    const double dt2 = dt * dt;
    const double noise_coef = dt * dt / spec.cell_area();  // = cfl = 1
    PathState state;
    state.prev = init.u0;
    state.curr.resize(nx);
    for (int j = 0; j < nx; ++j) {
        const int jp = spec.wrap(j + 1), jm = spec.wrap(j - 1);
        double v = init.u0[j] + dt * init.u1[j] +
                   0.5 * (init.u0[jp] - 2.0 * init.u0[j] + init.u0[jm]);
        if (params.drift_enabled) v += 0.5 * dt2 * drift_term(init.u0[j], params);
        // Half-weight first row: the slab average at step n is
        // (W(n) + W(n-1))/2 with W(-1) = 0.
        v += params.g(init.u0[j]) * noise_coef * 0.5 * noise.increment(0, j);
        state.curr[j] = v;
    }
    state.step_index = 1;
    return state;
}

PathState step(PathState state, const ModelParams& params, const NoiseGrid& noise,
               const GridSpec& spec) {
    if (state.dead) throw std::logic_error("step: state is in the cemetery");
    if (state.step_index + 1 > spec.nt)
        throw std::logic_error("step: past the grid horizon");
    const int nx = spec.nx;
    const int n = state.step_index;
    const double dt2 = spec.dt() * spec.dt();
    const double noise_coef = dt2 / spec.cell_area();
    std::vector<double> next(std::move(state.prev));
    for (int j = 0; j < nx; ++j) {
        const int jp = spec.wrap(j + 1), jm = spec.wrap(j - 1);
        double v = state.curr[jp] + state.curr[jm] - next[j];
        if (params.drift_enabled) v += dt2 * drift_term(state.curr[j], params);
        double w = 0.5 * (noise.increment(n, j) + noise.increment(n - 1, j));
        v += params.g(state.curr[j]) * noise_coef * w;
        next[j] = v;
    }
    state.prev = std::move(state.curr);
    state.curr = std::move(next);
    state.step_index = n + 1;
    return state;
}

RunOutput run_path(const ModelParams& params, const InitialData& init,
                   const GridSpec& spec, const NoiseGrid& noise,
                   const RunOptions& options) {
    const int nx = spec.nx;
    RunOutput out;
    PathRecord& rec = out.record;
    rec.seed = noise.seed();
    rec.alpha = params.alpha;
    rec.minima.reserve(spec.nt + 1);
    rec.singular_trace.reserve(spec.nt);
    if (options.keep_history) {
        out.history = FieldHistory{spec, {}, 0};
        out.history->values.reserve(static_cast<std::size_t>(spec.nt + 1) * nx);
    }

    // Girsanov accumulation state (drift-removal weight along the run).
    const bool weigh = options.girsanov_budget > 0.0;
    double logw = 0.0;
    bool weighing = weigh;

    PathState state;
    state.prev = init.u0;
    state.curr = init.u0;  // placeholder until the first step
    double singular = 0.0;

    auto process_slice = [&](int n, const std::vector<double>& slice) -> bool {
        // Returns false when the march must stop (hit or invalid).
        double mn = slice[0];
        bool finite = true;
        for (double v : slice) {
            mn = std::min(mn, v);
            finite = finite && std::isfinite(v);
        }
        if (!finite) {
            rec.invalid = true;
            return false;
        }
        if (options.keep_history) {
            out.history->values.insert(out.history->values.end(), slice.begin(), slice.end());
            out.history->steps_stored = n;
        }
        rec.minima.push_back(mn);
        if (options.stop_on_hit && mn <= options.hit_level) {
            rec.hit = true;
            rec.tau_hat = spec.t(n);
            return false;
        }
        if (n < spec.nt) {
            // Slab n of the singular integral; the stopped slice itself is
            // excluded (the continuum stop is a measure-zero time section).
            singular += singular_slice(slice.data(), spec, params);
            rec.singular_trace.push_back(singular);
        }
        return true;
    };

    auto absorb_weight = [&](int n, const std::vector<double>& slice) {
        if (!weighing) return;
        // Stop accumulating once the budget is crossed: rows strictly
        // before the crossing slab keep the exponent bounded by m.
        if (!rec.singular_trace.empty() && rec.singular_trace.back() > options.girsanov_budget) {
            weighing = false;
            return;
        }
        const double area = spec.cell_area();
        for (int j = 0; j < nx; ++j) {
            double r = slice[j];
            double h = r > 0.0 ? std::pow(r, -params.alpha) / params.g(r) : 0.0;
            if (h != 0.0) logw += h * noise.increment(n, j) - 0.5 * h * h * area;
        }
    };

    bool alive = process_slice(0, state.prev);
    if (alive && spec.nt >= 1) {
        absorb_weight(0, state.prev);
        state = first_step_init(init, params, spec, noise);
        for (int n = 1;; ++n) {
            alive = process_slice(n, state.curr);
            if (!alive || n == spec.nt) break;
            absorb_weight(n, state.curr);
            state = step(std::move(state), params, noise, spec);
        }
    }
    if (rec.hit || rec.invalid) state.dead = true;

    rec.singular_integral = singular;
    rec.log_weight = logw;
    for (long long n : options.tau_ladder)
        rec.tau_n_hats.emplace_back(n, rec.tau_n_hat(n, spec));
    return out;
}

RunOutput run_path(const ModelParams& params, const InitialData& init,
                   const GridSpec& spec, std::uint64_t seed,
                   const RunOptions& options) {
    return run_path(params, init, spec, NoiseGrid::generate(spec, seed), options);
}

}  // namespace stochwave

#include "stochwave/circle_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace stochwave {

GridSpec GridSpec::make(double circle_length, int nx, double horizon) {
    if (circle_length <= 0.0) throw std::invalid_argument("circle length must be positive");
    if (nx < 8) throw std::invalid_argument("need at least 8 spatial cells");
    if (horizon <= 0.0) throw std::invalid_argument("horizon must be positive");
    GridSpec spec;
    spec.circle_length = circle_length;
    spec.nx = nx;
    spec.nt = std::max<int>(1, static_cast<int>(std::llround(horizon / (circle_length / nx))));
    return spec;
}

CircleCoord CircleCoord::reduce(double x, double circle_length) {
    double r = std::fmod(x, circle_length);
    if (r < 0.0) r += circle_length;
    if (r >= circle_length) r = 0.0;  // fmod can land on J for tiny negatives
    return CircleCoord{r};
}

double line_kernel(double t, double x) {
    if (t < 0.0) throw std::domain_error("line_kernel: negative time");
    return std::abs(x) <= t ? 0.5 : 0.0;
}

double circle_kernel(double t, double x, double circle_length) {
    if (t < 0.0) throw std::domain_error("circle_kernel: negative time");
    if (circle_length <= 0.0) throw std::domain_error("circle_kernel: nonpositive period");
    // |x + nJ| <= t forces |n| <= (t + |x|)/J; ceil(t/J)+1 covers it once x
    // is reduced to one period.
    double xr = CircleCoord::reduce(x, circle_length).value;
    int max_n = static_cast<int>(std::ceil(t / circle_length)) + 1;
    double sum = 0.0;
    for (int n = -max_n; n <= max_n; ++n) {
        if (std::abs(xr + n * circle_length) <= t) sum += 0.5;
    }
    return sum;
}

double kernel_space_integral(double t, double circle_length) {
    if (t < 0.0) throw std::domain_error("kernel_space_integral: negative time");
    (void)circle_length;
    return t;
}

InitialData InitialData::constant(const GridSpec& spec, double position, double velocity) {
    InitialData init;
    init.u0.assign(spec.nx, position);
    init.u1.assign(spec.nx, velocity);
    init.lower_bound = position;
    init.upper_bound = position;
    init.validate();
    return init;
}

InitialData InitialData::cosine(const GridSpec& spec, double mean, double amp,
                                double v_mean, double v_amp) {
    InitialData init;
    init.u0.resize(spec.nx);
    init.u1.resize(spec.nx);
    const double w = 2.0 * std::numbers::pi / spec.circle_length;
    for (int j = 0; j < spec.nx; ++j) {
        init.u0[j] = mean + amp * std::cos(w * spec.x(j));
        init.u1[j] = v_mean + v_amp * std::cos(w * spec.x(j));
    }
    init.lower_bound = *std::min_element(init.u0.begin(), init.u0.end());
    init.upper_bound = *std::max_element(init.u0.begin(), init.u0.end());
    init.validate();
    return init;
}

InitialData InitialData::tabulated(const GridSpec& spec, std::vector<double> u0,
                                   std::vector<double> u1) {
    if (static_cast<int>(u0.size()) != spec.nx || static_cast<int>(u1.size()) != spec.nx)
        throw std::invalid_argument("tabulated initial data must match the grid");
    InitialData init;
    init.u0 = std::move(u0);
    init.u1 = std::move(u1);
    init.lower_bound = *std::min_element(init.u0.begin(), init.u0.end());
    init.upper_bound = *std::max_element(init.u0.begin(), init.u0.end());
    init.validate();
    return init;
}

void InitialData::validate() const {
    if (u0.empty() || u0.size() != u1.size())
        throw std::invalid_argument("initial data: empty or mismatched samples");
    if (!(lower_bound > 0.0) || !(lower_bound <= upper_bound))
        throw std::invalid_argument("initial position must satisfy 0 < c0 <= C0");
    for (double v : u0)
        if (!std::isfinite(v) || v < lower_bound || v > upper_bound)
            throw std::invalid_argument("initial position outside declared bounds");
    for (double v : u1)
        if (!std::isfinite(v)) throw std::invalid_argument("initial velocity not finite");
}

double dalembert(const InitialData& init, const GridSpec& spec, int t_step, int x_index) {
    if (t_step < 0 || t_step > spec.nt)
        throw std::domain_error("dalembert: time outside the grid horizon");
    const int j = spec.wrap(x_index);
    const int m = t_step;
    double value = 0.5 * (init.u0[spec.wrap(j + m)] + init.u0[spec.wrap(j - m)]);
    if (m > 0) {
        // (1/2) integral of u1 over [x - t, x + t], trapezoid on grid nodes.
        double acc = 0.5 * (init.u1[spec.wrap(j - m)] + init.u1[spec.wrap(j + m)]);
        for (int l = -m + 1; l <= m - 1; ++l) acc += init.u1[spec.wrap(j + l)];
        value += 0.5 * acc * spec.dx();
    }
    return value;
}

bool LightCone::contains_line(double s, double y) const {
    return std::abs(apex_x - y) < apex_t - s;
}

bool LightCone::contains(double s, double y) const {
    if (s >= apex_t) return false;
    // Some unwrapped copy of y is inside iff the circle distance is.
    double d = CircleCoord::reduce(apex_x - y, circle_length).value;
    d = std::min(d, circle_length - d);
    return d < apex_t - s;
}

std::vector<ConeCell> cone_members(const LightCone& cone, const GridSpec& spec) {
    std::map<std::pair<int, int>, int> cells;
    const double J = spec.circle_length;
    const int max_q = static_cast<int>(std::ceil(std::max(cone.apex_t, 0.0) / J)) + 1;
    // Half-ulp guard: for apexes on the lattice the strict boundary |x-y| =
    // t-s lands on exact cell coordinates, and rounding must not flip those
    // cells in.
    const double guard = 1e-9 * spec.dx();
    for (int n = 0; n < spec.nt; ++n) {
        const double reach = cone.apex_t - spec.t(n) - guard;
        if (reach <= 0.0) break;
        for (int i = 0; i < spec.nx; ++i) {
            const double y = spec.x(i);
            for (int q = -max_q; q <= max_q; ++q) {
                if (std::abs(cone.apex_x - (y + q * J)) < reach)
                    cells[{n, i}] += 1;
            }
        }
    }
    std::vector<ConeCell> members;
    members.reserve(cells.size());
    for (const auto& [key, copies] : cells)
        members.push_back(ConeCell{key.first, key.second, copies});
    return members;
}

std::int64_t cone_cell_count(const std::vector<ConeCell>& members) {
    std::int64_t total = 0;
    for (const auto& cell : members) total += cell.copies;
    return total;
}

}  // namespace stochwave

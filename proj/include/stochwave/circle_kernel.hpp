#ifndef STOCHWAVE_CIRCLE_KERNEL_HPP
#define STOCHWAVE_CIRCLE_KERNEL_HPP

#include <vector>

#include "stochwave/grid.hpp"

namespace stochwave {

/// Position reduced to the fundamental domain [0, J).
struct CircleCoord {
    double value = 0.0;
    static CircleCoord reduce(double x, double circle_length);
};

/// Line wave kernel S(t,x) = 1/2 on {|x| <= t}, 0 outside.  Closed boundary.
/// Throws std::domain_error for t < 0.
double line_kernel(double t, double x);

/// Periodized kernel S_I(t,x) = sum_n S(t, x + nJ).  Finite sum; terms with
/// |n| > ceil(t/J)+1 vanish identically.
double circle_kernel(double t, double x, double circle_length);

/// Spatial integral of the circle kernel over one period; equals t exactly.
double kernel_space_integral(double t, double circle_length);

/// Initial position and velocity sampled at cell centers, with the bounds of
/// u0 kept as metadata (the position must be bounded away from zero).
struct InitialData {
    std::vector<double> u0;
    std::vector<double> u1;
    double lower_bound = 0.0;  // c0
    double upper_bound = 0.0;  // C0

    static InitialData constant(const GridSpec& spec, double position,
                                double velocity = 0.0);
    /// u0(x) = mean + amp*cos(2 pi x / J), u1 likewise with (v_mean, v_amp).
    static InitialData cosine(const GridSpec& spec, double mean, double amp,
                              double v_mean = 0.0, double v_amp = 0.0);
    static InitialData tabulated(const GridSpec& spec, std::vector<double> u0,
                                 std::vector<double> u1);

    /// Checks 0 < c0 <= u0 <= C0 and that u1 is finite.  Throws on violation.
    void validate() const;
};

/// Deterministic wave solution w(t,x) at grid node (t_step, x_index):
/// the half-sum of the transported initial position plus the kernel integral
/// of the initial velocity (trapezoid on the wrapped interval).  Exact for
/// grid-resolved data at unit CFL.  Throws std::domain_error when t_step
/// exceeds the grid horizon.
double dalembert(const InitialData& init, const GridSpec& spec, int t_step,
                 int x_index);

/// Backward light cone {(s,y): |x - y| < t - s} with apex (t,x).
struct LightCone {
    double apex_t = 0.0;
    double apex_x = 0.0;
    double circle_length = 0.0;

    /// Strict membership on the unwrapped line.
    bool contains_line(double s, double y) const;
    /// Strict membership with y reduced to the circle (minimal distance over
    /// unwrapped copies).
    bool contains(double s, double y) const;
};

/// One noise cell inside a cone, with the number of unwrapped copies of the
/// cell that fall inside (greater than 1 once the cone wraps the circle).
struct ConeCell {
    int t_index = 0;
    int x_index = 0;
    int copies = 1;
};

/// Grid cells whose representative point (slab start time, cell center)
/// satisfies the strict cone inequality, enumerated with unwrapped
/// multiplicity.  At unit CFL this set is exactly the noise support of the
/// scheme's value at the apex.
std::vector<ConeCell> cone_members(const LightCone& cone, const GridSpec& spec);

/// Total member count including multiplicity.
std::int64_t cone_cell_count(const std::vector<ConeCell>& members);

}  // namespace stochwave

#endif

#ifndef STOCHWAVE_GRID_HPP
#define STOCHWAVE_GRID_HPP

#include <cstdint>

namespace stochwave {

/// Uniform space-time grid on the circle of length J.  The time step is
/// locked to dt = dx (unit CFL), so the discrete domain of dependence of the
/// explicit scheme coincides with the continuum light cone.
///
/// Layout: field values live at cell centers x_j = (j + 1/2) dx and integer
/// times t_n = n dt.  Noise increments live on the cells
/// [j dx, (j+1) dx) x [n dt, (n+1) dt).
struct GridSpec {
    double circle_length = 1.0;  // J
    int nx = 0;                  // spatial cells
    int nt = 0;                  // time steps

    double dx() const { return circle_length / nx; }
    double dt() const { return dx(); }  // cfl = dt/dx = 1, locked
    double cfl() const { return 1.0; }
    double horizon() const { return nt * dt(); }
    double cell_area() const { return dt() * dx(); }

    double x(int j) const { return (j + 0.5) * dx(); }
    double t(int n) const { return n * dt(); }

    int wrap(int j) const {
        int r = j % nx;
        return r < 0 ? r + nx : r;
    }

    std::int64_t cells() const { return static_cast<std::int64_t>(nt) * nx; }

    bool operator==(const GridSpec&) const = default;

    /// Builds a grid with nt chosen so that nt*dt is the closest grid-aligned
    /// time to the requested horizon.  Throws std::invalid_argument on bad
    /// input (nx < 8, nonpositive J or T).
    static GridSpec make(double circle_length, int nx, double horizon);
};

}  // namespace stochwave

#endif

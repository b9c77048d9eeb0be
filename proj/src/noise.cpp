#include "stochwave/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stochwave/circle_kernel.hpp"

namespace stochwave {

namespace philox {

namespace {
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMultA = 0xD2511F53u;
constexpr std::uint32_t kMultB = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}
}  // namespace

Block philox4x32(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                 std::uint32_t c3, std::uint32_t k0, std::uint32_t k1) {
    std::uint32_t x[4] = {c0, c1, c2, c3};
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMultA, x[0], lo0, hi0);
        mulhilo(kMultB, x[2], lo1, hi1);
        std::uint32_t y0 = hi1 ^ x[1] ^ k0;
        std::uint32_t y1 = lo1;
        std::uint32_t y2 = hi0 ^ x[3] ^ k1;
        std::uint32_t y3 = lo0;
        x[0] = y0; x[1] = y1; x[2] = y2; x[3] = y3;
        k0 += kWeylA;
        k1 += kWeylB;
    }
    return Block{{x[0], x[1], x[2], x[3]}};
}

double cell_gaussian(std::uint64_t seed, std::uint32_t n, std::uint32_t j) {
    Block b = philox4x32(n, j, 0u, 0u, static_cast<std::uint32_t>(seed),
                         static_cast<std::uint32_t>(seed >> 32));
    std::uint64_t w0 = (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
    std::uint64_t w1 = (static_cast<std::uint64_t>(b.v[2]) << 32) | b.v[3];
    // Strictly inside (0,1) so the log is finite.
    double u0 = (static_cast<double>(w0 >> 11) + 0.5) * 0x1.0p-53;
    double u1 = (static_cast<double>(w1 >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u0)) * std::cos(2.0 * std::numbers::pi * u1);
}

}  // namespace philox

DriftShift DriftShift::constant(const GridSpec& spec, double value) {
    DriftShift s;
    s.spec = spec;
    s.h.assign(static_cast<std::size_t>(spec.nt) * spec.nx, value);
    return s;
}

DriftShift DriftShift::from_grid(const GridSpec& spec, std::vector<double> values) {
    if (values.size() != static_cast<std::size_t>(spec.nt) * spec.nx)
        throw std::invalid_argument("drift shift: values do not match the grid");
    DriftShift s;
    s.spec = spec;
    s.h = std::move(values);
    return s;
}

NoiseGrid NoiseGrid::generate(const GridSpec& spec, std::uint64_t seed) {
    return NoiseGrid(spec, seed, std::sqrt(spec.cell_area()));
}

NoiseGrid NoiseGrid::zeros(const GridSpec& spec) {
    return NoiseGrid(spec, 0, 0.0);
}

NoiseGrid NoiseGrid::from_values(const GridSpec& spec, std::vector<double> values) {
    if (values.size() != static_cast<std::size_t>(spec.nt) * spec.nx)
        throw std::invalid_argument("noise grid: values do not match the grid");
    NoiseGrid g(spec, 0, 0.0);
    g.data_ = std::move(values);
    return g;
}

NoiseGrid NoiseGrid::shifted(const DriftShift& shift) const {
    if (!(shift.spec == spec_))
        throw std::invalid_argument("noise shift: grid mismatch");
    NoiseGrid out = *this;
    if (!out.shift_) {
        out.shift_ = shift.h;
    } else {
        for (std::size_t i = 0; i < out.shift_->size(); ++i)
            (*out.shift_)[i] += shift.h[i];
    }
    return out;
}

NoiseGrid NoiseGrid::materialized() const {
    std::vector<double> values(static_cast<std::size_t>(spec_.nt) * spec_.nx);
    std::size_t idx = 0;
    for (int n = 0; n < spec_.nt; ++n)
        for (int j = 0; j < spec_.nx; ++j, ++idx) values[idx] = increment(n, j);
    NoiseGrid out = from_values(spec_, std::move(values));
    out.seed_ = seed_;
    return out;
}

NoiseGrid NoiseGrid::coarsen(const NoiseGrid& fine, int factor) {
    if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
    const GridSpec& fs = fine.spec();
    if (fs.nx % factor != 0 || fs.nt % factor != 0)
        throw std::invalid_argument("coarsen: extents not divisible by factor");
    GridSpec cs;
    cs.circle_length = fs.circle_length;
    cs.nx = fs.nx / factor;
    cs.nt = fs.nt / factor;
    std::vector<double> values(static_cast<std::size_t>(cs.nt) * cs.nx, 0.0);
    for (int n = 0; n < cs.nt; ++n)
        for (int j = 0; j < cs.nx; ++j) {
            double sum = 0.0;
            for (int a = 0; a < factor; ++a)
                for (int b = 0; b < factor; ++b)
                    sum += fine.increment(n * factor + a, j * factor + b);
            values[static_cast<std::size_t>(n) * cs.nx + j] = sum;
        }
    return from_values(cs, std::move(values));
}

namespace {

double convolve(const NoiseGrid& noise, const double* rho_grid, double rho_const,
                int t_index, int x_index) {
    const GridSpec& spec = noise.spec();
    if (t_index < 0 || t_index > spec.nt || x_index < 0 || x_index >= spec.nx)
        throw std::domain_error("stochastic_convolution: point outside the grid");
    const double dt = spec.dt();
    const double J = spec.circle_length;
    const double xj = spec.x(x_index);
    double sum = 0.0;
    for (int n = 0; n < t_index; ++n) {
        // Kernel at the cell center; the half-offset keeps the closed
        // boundary |x| <= t away from the lattice.
        const double lag = (t_index - n - 0.5) * dt;
        const double* row = rho_grid ? rho_grid + static_cast<std::size_t>(n) * spec.nx : nullptr;
        for (int i = 0; i < spec.nx; ++i) {
            double k = circle_kernel(lag, xj - spec.x(i), J);
            if (k == 0.0) continue;
            sum += k * (row ? row[i] : rho_const) * noise.increment(n, i);
        }
    }
    return sum;
}

}  // namespace

double stochastic_convolution(const NoiseGrid& noise, const std::vector<double>& rho,
                              int t_index, int x_index) {
    const GridSpec& spec = noise.spec();
    if (rho.size() < static_cast<std::size_t>(t_index) * spec.nx)
        throw std::invalid_argument("stochastic_convolution: weight grid too short");
    return convolve(noise, rho.data(), 0.0, t_index, x_index);
}

double stochastic_convolution(const NoiseGrid& noise, double rho, int t_index,
                              int x_index) {
    return convolve(noise, nullptr, rho, t_index, x_index);
}

}  // namespace stochwave

#ifndef STOCHWAVE_NOISE_HPP
#define STOCHWAVE_NOISE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "stochwave/grid.hpp"

namespace stochwave {

/// Philox-4x32-10 counter-based generator.  Any cell of the noise grid is
/// reproducible from (seed, time index, space index) alone, so workers never
/// need to store or communicate noise.
namespace philox {
struct Block {
    std::uint32_t v[4];
};
Block philox4x32(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                 std::uint32_t c3, std::uint32_t k0, std::uint32_t k1);
/// Standard normal draw keyed by (seed, n, j), via Box-Muller on the first
/// two 64-bit lanes of the block.
double cell_gaussian(std::uint64_t seed, std::uint32_t n, std::uint32_t j);
}  // namespace philox

/// Predictable shift h(s,y) sampled on the noise lattice.  Row n may depend
/// only on field values at steps <= n, which the builders enforce by
/// construction order.
struct DriftShift {
    GridSpec spec;
    std::vector<double> h;  // nt x nx, row-major

    double at(int n, int j) const { return h[static_cast<std::size_t>(n) * spec.nx + j]; }
    static DriftShift constant(const GridSpec& spec, double value);
    static DriftShift from_grid(const GridSpec& spec, std::vector<double> values);
};

/// Discrete space-time white noise: independent N(0, dt*dx) per cell.
/// Lazily generated from the counter-based generator unless materialized
/// (after a mask or coarsening).  Shifts are kept separately in h-space and
/// composed there, so shifting by h and then by -h restores the original
/// increments bit-exactly.
class NoiseGrid {
  public:
    static NoiseGrid generate(const GridSpec& spec, std::uint64_t seed);
    static NoiseGrid zeros(const GridSpec& spec);
    static NoiseGrid from_values(const GridSpec& spec, std::vector<double> values);

    /// W(cell), variance dt*dx; base increment plus h(n,j)*dt*dx when shifted.
    double increment(int n, int j) const {
        const std::size_t idx = static_cast<std::size_t>(n) * spec_.nx + j;
        double base = data_ ? (*data_)[idx]
                            : scale_ * philox::cell_gaussian(seed_,
                                                             static_cast<std::uint32_t>(n),
                                                             static_cast<std::uint32_t>(j));
        if (shift_) {
            double h = (*shift_)[idx];
            if (h != 0.0) base += h * spec_.cell_area();
        }
        return base;
    }

    /// increments'(n,j) = increments(n,j) + h(n,j)*dt*dx.  Produces the W
    /// whose tilde-version is this grid.  Throws on shape mismatch.
    NoiseGrid shifted(const DriftShift& shift) const;

    /// Dense copy (identical increments; shift baked in).
    NoiseGrid materialized() const;

    /// Sums factor x factor fine cells onto each coarse cell; the result has
    /// variance dt_coarse * dx_coarse per cell.  Fine extents must be exact
    /// multiples of factor.
    static NoiseGrid coarsen(const NoiseGrid& fine, int factor);

    const GridSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }

  private:
    NoiseGrid(GridSpec spec, std::uint64_t seed, double scale)
        : spec_(spec), seed_(seed), scale_(scale) {}
    GridSpec spec_;
    std::uint64_t seed_ = 0;
    double scale_ = 0.0;  // sqrt(dt*dx) in lazy mode
    std::optional<std::vector<double>> data_;
    std::optional<std::vector<double>> shift_;  // h values, not premultiplied
};

/// Walsh integral of the wave kernel against a bounded weight:
///   N_rho(t_m, x_j) = sum over cells S_I(t_m - s_c, x_j - y_c) rho W(cell)
/// with the kernel sampled at cell centers.  rho is a full nt x nx grid.
double stochastic_convolution(const NoiseGrid& noise, const std::vector<double>& rho,
                              int t_index, int x_index);
/// Same with rho constant.
double stochastic_convolution(const NoiseGrid& noise, double rho, int t_index,
                              int x_index);

}  // namespace stochwave

#endif

#ifndef STOCHWAVE_CONFIG_HPP
#define STOCHWAVE_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochwave/circle_kernel.hpp"
#include "stochwave/grid.hpp"
#include "stochwave/solver.hpp"

namespace stochwave {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Initial-data descriptor as it appears in config files.
struct InitDescriptor {
    enum class Kind { constant, cosine, tabulated } kind = Kind::constant;
    double value = 0.2;       // constant level / cosine mean
    double amplitude = 0.0;   // cosine amplitude
    double velocity = 0.0;    // constant u1
    std::vector<double> table_u0, table_u1;

    InitialData build(const GridSpec& spec) const;
};

/// One experiment: grid, model, initial data, ensemble and output settings.
/// Parsed from a flat key = value file; '#' starts a comment.
struct ExperimentConfig {
    double circle_length = 1.0;  // J
    int nx = 256;
    double horizon = 1.0;  // T

    double alpha = 0.5;
    std::vector<double> alpha_list;  // sweeps; falls back to {alpha}
    std::string g_descriptor = "constant:1.0";
    long long trunc_level = 1000000;
    bool drift_enabled = true;

    InitDescriptor init;
    long long n_paths = 400;
    std::uint64_t base_seed = 12345;
    double hit_level = 0.0;
    double girsanov_budget = 0.0;  // m; 0 disables weight accumulation
    int workers = 0;               // 0 = hardware concurrency

    std::string out_path = "sweep.csv";
    std::string format = "csv";  // csv | json

    GridSpec grid() const;
    ModelParams params(double alpha_value) const;
    std::vector<double> alphas() const;

    /// Throws ConfigError on unknown keys, malformed values or invariant
    /// violations (n_paths >= 1, alpha > 0, initial bounds positive, ...).
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(std::istream& in);
    void validate() const;
};

Diffusion parse_diffusion(const std::string& descriptor);

}  // namespace stochwave

#endif

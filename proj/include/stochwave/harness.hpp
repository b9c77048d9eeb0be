#ifndef STOCHWAVE_HARNESS_HPP
#define STOCHWAVE_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stochwave/config.hpp"
#include "stochwave/solver.hpp"
#include "stochwave/stats.hpp"

namespace stochwave {

struct PerPathRow {
    std::uint64_t seed = 0;
    double alpha = 0.0;
    bool hit = false;
    double tau_hat = 0.0;
    double min_over_run = 0.0;
    double singular_integral = 0.0;
    double log_weight = 0.0;
    bool invalid = false;
};

struct SweepRow {
    double alpha = 0.0;
    long long n_paths = 0;
    long long n_hit = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double mean_tau = 0.0;  // among hits; nan when none
    long long invalid_count = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<PerPathRow> paths;  // ordered by (alpha, seed)
};

/// Runs n_paths paths per alpha with seeds base_seed + i (shared across
/// alphas) on a worker pool, and aggregates order-independently.
/// Deterministic in the config, including under any worker count.
SweepResult run_sweep(const ExperimentConfig& config);

/// Per-path rows -> aggregate row; input order does not matter.
SweepRow summarize(double alpha, std::vector<PerPathRow> rows);

struct RefineLevel {
    int nx = 0;
    long long n_hit = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double mean_singular = 0.0;
    long long invalid_count = 0;
};

struct RefineResult {
    std::vector<int> levels;                        // nx per level
    std::vector<RefineLevel> rows;
    std::vector<std::vector<double>> singulars;     // [level][path]
    std::vector<std::vector<int>> hits;             // [level][path]
    /// (max - min)/mean of the per-path singular integral across levels.
    std::vector<double> path_spread;
    double agreement_fraction = 0.0;  // paths with spread <= 0.25
};

/// Reruns the same seeds at each nx in `levels` (dt locked to dx).  Noise is
/// generated once on the finest lattice and summed onto coarser cells, so
/// every level sees the same realization.  Throws on nx > 65536.
RefineResult refine_study(const ExperimentConfig& config, std::vector<int> levels);

enum class OutputFormat { csv, json };
OutputFormat parse_format(const std::string& name);

/// Atomic writers: the file appears only on success (tmp + rename), so a
/// failed write leaves nothing behind.  CSV is RFC-4180 with LF endings and
/// 17 significant digits.
void emit_sweep(const SweepResult& result, OutputFormat format, const std::string& path);
void emit_paths(const std::vector<PerPathRow>& rows, OutputFormat format, const std::string& path);
void emit_refine(const RefineResult& result, OutputFormat format, const std::string& path);

std::string sweep_csv(const SweepResult& result);
std::string paths_csv(const std::vector<PerPathRow>& rows);
std::string sweep_json(const SweepResult& result);
std::string paths_json(const std::vector<PerPathRow>& rows);
std::string refine_csv(const RefineResult& result);
std::string refine_json(const RefineResult& result);

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware).
void parallel_for(long long n, int workers, const std::function<void(long long)>& fn);

}  // namespace stochwave

#endif

#include "stochwave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace stochwave {

void parallel_for(long long n, int workers, const std::function<void(long long)>& fn) {
    int t = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    t = static_cast<int>(std::min<long long>(t, n));
    if (t <= 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int k = 0; k < t; ++k)
        pool.emplace_back([&, k] {
            for (long long i = k; i < n; i += t) fn(i);
        });
    for (auto& th : pool) th.join();
}

SweepRow summarize(double alpha, std::vector<PerPathRow> rows) {
    std::sort(rows.begin(), rows.end(),
              [](const PerPathRow& a, const PerPathRow& b) { return a.seed < b.seed; });
    SweepRow out;
    out.alpha = alpha;
    out.n_paths = static_cast<long long>(rows.size());
    double tau_sum = 0.0;
    for (const auto& r : rows) {
        if (r.invalid) {
            ++out.invalid_count;
            continue;
        }
        if (r.hit) {
            ++out.n_hit;
            tau_sum += r.tau_hat;
        }
    }
    out.p_hat = out.n_paths > 0 ? static_cast<double>(out.n_hit) / out.n_paths : 0.0;
    Interval ci = wilson_interval(out.n_hit, out.n_paths);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
    out.mean_tau = out.n_hit > 0 ? tau_sum / out.n_hit
                                 : std::numeric_limits<double>::quiet_NaN();
    return out;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    const GridSpec spec = config.grid();
    const InitialData init = config.init.build(spec);
    SweepResult result;
    for (double alpha : config.alphas()) {
        const ModelParams params = config.params(alpha);
        RunOptions options;
        options.hit_level = config.hit_level;
        options.girsanov_budget = config.girsanov_budget;
        std::vector<PerPathRow> rows(config.n_paths);
        parallel_for(config.n_paths, config.workers, [&](long long i) {
            const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
            RunOutput out = run_path(params, init, spec, seed, options);
            const PathRecord& rec = out.record;
            rows[i] = PerPathRow{seed,       alpha,
                                 rec.hit,    rec.tau_hat,
                                 rec.min_over_run(), rec.singular_integral,
                                 rec.log_weight,     rec.invalid};
        });
        result.rows.push_back(summarize(alpha, rows));
        std::sort(rows.begin(), rows.end(),
                  [](const PerPathRow& a, const PerPathRow& b) { return a.seed < b.seed; });
        result.paths.insert(result.paths.end(), rows.begin(), rows.end());
    }
    return result;
}

RefineResult refine_study(const ExperimentConfig& config, std::vector<int> levels) {
    if (levels.empty()) throw std::invalid_argument("refine_study: no levels");
    std::sort(levels.begin(), levels.end());
    const int finest = levels.back();
    if (finest > 65536) throw std::invalid_argument("refine_study: nx > 65536");
    for (int nx : levels)
        if (nx < 8 || finest % nx != 0)
            throw std::invalid_argument("refine_study: levels must divide the finest nx");

    GridSpec fine = GridSpec::make(config.circle_length, finest, config.horizon);
    // Align nt so every coarse lattice divides the fine one.
    const int max_factor = finest / levels.front();
    fine.nt = ((fine.nt + max_factor - 1) / max_factor) * max_factor;

    RefineResult result;
    result.levels = levels;
    result.singulars.assign(levels.size(), std::vector<double>(config.n_paths, 0.0));
    result.hits.assign(levels.size(), std::vector<int>(config.n_paths, 0));
    std::vector<std::vector<int>> invalid(levels.size(),
                                          std::vector<int>(config.n_paths, 0));

    const ModelParams params = config.params(config.alphas().front());
    RunOptions options;
    options.hit_level = config.hit_level;

    parallel_for(config.n_paths, config.workers, [&](long long i) {
        const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
        const NoiseGrid fine_noise = NoiseGrid::generate(fine, seed);
        for (std::size_t li = 0; li < levels.size(); ++li) {
            const int factor = finest / levels[li];
            GridSpec spec;
            spec.circle_length = fine.circle_length;
            spec.nx = levels[li];
            spec.nt = fine.nt / factor;
            const NoiseGrid noise =
                factor == 1 ? fine_noise : NoiseGrid::coarsen(fine_noise, factor);
            const InitialData init = config.init.build(spec);
            RunOutput out = run_path(params, init, spec, noise, options);
            result.singulars[li][i] = out.record.singular_integral;
            result.hits[li][i] = out.record.hit ? 1 : 0;
            invalid[li][i] = out.record.invalid ? 1 : 0;
        }
    });

    for (std::size_t li = 0; li < levels.size(); ++li) {
        RefineLevel row;
        row.nx = levels[li];
        double si_sum = 0.0;
        long long valid = 0;
        for (long long i = 0; i < config.n_paths; ++i) {
            if (invalid[li][i]) {
                ++row.invalid_count;
                continue;
            }
            ++valid;
            row.n_hit += result.hits[li][i];
            si_sum += result.singulars[li][i];
        }
        row.p_hat = static_cast<double>(row.n_hit) / config.n_paths;
        Interval ci = wilson_interval(row.n_hit, config.n_paths);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        row.mean_singular = valid > 0 ? si_sum / valid : 0.0;
        result.rows.push_back(row);
    }

    long long compared = 0, agreeing = 0;
    result.path_spread.assign(config.n_paths, std::numeric_limits<double>::quiet_NaN());
    for (long long i = 0; i < config.n_paths; ++i) {
        bool ok = true;
        for (std::size_t li = 0; li < levels.size(); ++li) ok = ok && !invalid[li][i];
        if (!ok) continue;
        double lo = result.singulars[0][i], hi = lo, sum = 0.0;
        for (std::size_t li = 0; li < levels.size(); ++li) {
            lo = std::min(lo, result.singulars[li][i]);
            hi = std::max(hi, result.singulars[li][i]);
            sum += result.singulars[li][i];
        }
        double mean = sum / levels.size();
        double spread = mean > 0.0 ? (hi - lo) / mean : 0.0;
        result.path_spread[i] = spread;
        ++compared;
        if (spread <= 0.25) ++agreeing;
    }
    result.agreement_fraction =
        compared > 0 ? static_cast<double>(agreeing) / compared : 0.0;
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw std::runtime_error("write failed for '" + path + "'");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move output into place at '" + path + "'");
    }
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw std::invalid_argument("format must be csv or json");
}

std::string paths_csv(const std::vector<PerPathRow>& rows) {
    std::string out = "seed,alpha,hit,tau_hat,min_over_run,singular_integral,log_weight,invalid\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seed) + ',' + fmt(r.alpha) + ',' +
               (r.hit ? "1" : "0") + ',' + fmt(r.tau_hat) + ',' +
               fmt(r.min_over_run) + ',' + fmt(r.singular_integral) + ',' +
               fmt(r.log_weight) + ',' + (r.invalid ? "1" : "0") + '\n';
    }
    return out;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = "alpha,n_paths,n_hit,p_hat,ci_lo,ci_hi,mean_tau,invalid_count\n";
    for (const auto& r : result.rows) {
        out += fmt(r.alpha) + ',' + std::to_string(r.n_paths) + ',' +
               std::to_string(r.n_hit) + ',' + fmt(r.p_hat) + ',' + fmt(r.ci_lo) +
               ',' + fmt(r.ci_hi) + ',' + fmt(r.mean_tau) + ',' +
               std::to_string(r.invalid_count) + '\n';
    }
    return out;
}

std::string refine_csv(const RefineResult& result) {
    std::string out = "nx,n_hit,p_hat,ci_lo,ci_hi,mean_singular,invalid_count\n";
    for (const auto& r : result.rows) {
        out += std::to_string(r.nx) + ',' + std::to_string(r.n_hit) + ',' +
               fmt(r.p_hat) + ',' + fmt(r.ci_lo) + ',' + fmt(r.ci_hi) + ',' +
               fmt(r.mean_singular) + ',' + std::to_string(r.invalid_count) + '\n';
    }
    return out;
}

std::string paths_json(const std::vector<PerPathRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"seed", r.seed},
                       {"alpha", r.alpha},
                       {"hit", r.hit ? 1 : 0},
                       {"tau_hat", r.tau_hat},
                       {"min_over_run", r.min_over_run},
                       {"singular_integral", r.singular_integral},
                       {"log_weight", r.log_weight},
                       {"invalid", r.invalid ? 1 : 0}});
    }
    return arr.dump(2) + "\n";
}

std::string sweep_json(const SweepResult& result) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : result.rows) {
        arr.push_back({{"alpha", r.alpha},
                       {"n_paths", r.n_paths},
                       {"n_hit", r.n_hit},
                       {"p_hat", r.p_hat},
                       {"ci_lo", r.ci_lo},
                       {"ci_hi", r.ci_hi},
                       {"mean_tau", r.mean_tau},
                       {"invalid_count", r.invalid_count}});
    }
    return arr.dump(2) + "\n";
}

std::string refine_json(const RefineResult& result) {
    nlohmann::json doc;
    doc["levels"] = nlohmann::json::array();
    for (const auto& r : result.rows)
        doc["levels"].push_back({{"nx", r.nx},
                                 {"n_hit", r.n_hit},
                                 {"p_hat", r.p_hat},
                                 {"ci_lo", r.ci_lo},
                                 {"ci_hi", r.ci_hi},
                                 {"mean_singular", r.mean_singular},
                                 {"invalid_count", r.invalid_count}});
    doc["path_spread"] = result.path_spread;
    doc["agreement_fraction"] = result.agreement_fraction;
    return doc.dump(2) + "\n";
}

void emit_sweep(const SweepResult& result, OutputFormat format, const std::string& path) {
    atomic_write(path, format == OutputFormat::csv ? sweep_csv(result) : sweep_json(result));
}

void emit_paths(const std::vector<PerPathRow>& rows, OutputFormat format,
                const std::string& path) {
    atomic_write(path, format == OutputFormat::csv ? paths_csv(rows) : paths_json(rows));
}

void emit_refine(const RefineResult& result, OutputFormat format, const std::string& path) {
    atomic_write(path, format == OutputFormat::csv ? refine_csv(result) : refine_json(result));
}

}  // namespace stochwave

// Command-line driver: path simulation, alpha sweeps, refinement studies and
// the diagnostic reports, all driven by a flat key = value config file.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stochwave/analysis.hpp"
#include "stochwave/circle_kernel.hpp"
#include "stochwave/config.hpp"
#include "stochwave/girsanov.hpp"
#include "stochwave/harness.hpp"
#include "stochwave/noise.hpp"
#include "stochwave/solver.hpp"
#include "stochwave/stats.hpp"

namespace sw = stochwave;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format;
    int workers = -1;
    std::optional<std::uint64_t> seed;
    std::string alpha_list;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file");
    cmd->add_option("--out", opts.out_path, "output path");
    cmd->add_option("--format", opts.format, "csv | json");
    cmd->add_option("--workers", opts.workers, "worker threads (0 = hardware)");
    cmd->add_option("--seed", opts.seed, "base seed override");
    cmd->add_option("--alpha-list", opts.alpha_list, "comma-separated alphas");
}

sw::ExperimentConfig load_config(const CommonOpts& opts) {
    sw::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = sw::ExperimentConfig::load(opts.config_path);
    if (!opts.out_path.empty()) cfg.out_path = opts.out_path;
    if (!opts.format.empty()) cfg.format = opts.format;
    if (opts.workers >= 0) cfg.workers = opts.workers;
    if (opts.seed) cfg.base_seed = *opts.seed;
    if (!opts.alpha_list.empty()) {
        cfg.alpha_list.clear();
        std::stringstream ss(opts.alpha_list);
        std::string part;
        while (std::getline(ss, part, ',')) cfg.alpha_list.push_back(std::stod(part));
    }
    cfg.validate();
    return cfg;
}

void write_or_print(const std::string& content, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) {
        std::remove(tmp.c_str());
        throw std::runtime_error("write failed for '" + path + "'");
    }
    out.close();
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move output into place at '" + path + "'");
    }
}

std::string paths_out_name(const std::string& out, const std::string& ext) {
    auto dot = out.find_last_of('.');
    if (dot == std::string::npos) return out + "_paths" + ext;
    return out.substr(0, dot) + "_paths" + out.substr(dot);
}

int cmd_simulate(const CommonOpts& opts) {
    sw::ExperimentConfig cfg = load_config(opts);
    const sw::GridSpec spec = cfg.grid();
    const sw::InitialData init = cfg.init.build(spec);
    sw::RunOptions options;
    options.hit_level = cfg.hit_level;
    options.keep_history = true;
    options.girsanov_budget = cfg.girsanov_budget;
    sw::RunOutput out =
        sw::run_path(cfg.params(cfg.alphas().front()), init, spec, cfg.base_seed, options);
    const sw::PathRecord& rec = out.record;
    std::fprintf(stderr, "seed=%llu alpha=%g hit=%d tau=%g min=%g singular=%g invalid=%d\n",
                 static_cast<unsigned long long>(rec.seed), rec.alpha, rec.hit ? 1 : 0,
                 rec.tau_hat, rec.min_over_run(), rec.singular_integral, rec.invalid ? 1 : 0);

    const sw::FieldHistory& h = *out.history;
    if (cfg.format == "csv") {
        std::string csv = "t";
        for (int j = 0; j < spec.nx; ++j) csv += ",x" + std::to_string(j);
        csv += "\n";
        char buf[64];
        for (int n = 0; n <= h.steps_stored; ++n) {
            std::snprintf(buf, sizeof(buf), "%.17g", spec.t(n));
            csv += buf;
            for (int j = 0; j < spec.nx; ++j) {
                std::snprintf(buf, sizeof(buf), ",%.17g", h.at(n, j));
                csv += buf;
            }
            csv += "\n";
        }
        write_or_print(csv, cfg.out_path);
    } else {
        nlohmann::json doc;
        doc["seed"] = rec.seed;
        doc["alpha"] = rec.alpha;
        doc["hit"] = rec.hit;
        doc["tau_hat"] = rec.tau_hat;
        doc["minima"] = rec.minima;
        doc["singular_integral"] = rec.singular_integral;
        doc["log_weight"] = rec.log_weight;
        doc["field"] = nlohmann::json::array();
        for (int n = 0; n <= h.steps_stored; ++n) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < spec.nx; ++j) row.push_back(h.at(n, j));
            doc["field"].push_back(row);
        }
        write_or_print(doc.dump(2) + "\n", cfg.out_path);
    }
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& paths_out) {
    sw::ExperimentConfig cfg = load_config(opts);
    sw::SweepResult result = sw::run_sweep(cfg);
    sw::OutputFormat format = sw::parse_format(cfg.format);
    sw::emit_sweep(result, format, cfg.out_path);
    std::string ppath = paths_out.empty()
                            ? paths_out_name(cfg.out_path, cfg.format == "csv" ? ".csv" : ".json")
                            : paths_out;
    sw::emit_paths(result.paths, format, ppath);
    for (const auto& row : result.rows) {
        std::fprintf(stderr, "alpha=%g n=%lld hits=%lld p=%.4f ci=[%.4f,%.4f] invalid=%lld\n",
                     row.alpha, row.n_paths, row.n_hit, row.p_hat, row.ci_lo, row.ci_hi,
                     row.invalid_count);
        if (row.invalid_count * 1000 >= row.n_paths && row.invalid_count > 0) {
            std::fprintf(stderr, "numerical-failure budget exceeded at alpha=%g\n", row.alpha);
            return kExitNumerical;
        }
    }
    return 0;
}

int cmd_refine(const CommonOpts& opts, std::string levels_arg) {
    sw::ExperimentConfig cfg = load_config(opts);
    std::vector<int> levels;
    if (levels_arg.empty()) {
        levels = {cfg.nx, cfg.nx * 2, cfg.nx * 4};
    } else {
        std::stringstream ss(levels_arg);
        std::string part;
        while (std::getline(ss, part, ',')) levels.push_back(std::stoi(part));
    }
    sw::RefineResult result = sw::refine_study(cfg, levels);
    sw::emit_refine(result, sw::parse_format(cfg.format), cfg.out_path);
    std::fprintf(stderr, "agreement_fraction=%.3f over %lld paths\n",
                 result.agreement_fraction, static_cast<long long>(cfg.n_paths));
    return 0;
}

int cmd_holder(const CommonOpts& opts, int n_fields, int moment_p) {
    sw::ExperimentConfig cfg = load_config(opts);
    const sw::GridSpec spec = cfg.grid();
    const sw::InitialData init = cfg.init.build(spec);
    sw::ModelParams params = cfg.params(cfg.alphas().front());
    params.drift_enabled = false;  // the estimator targets the stochastic part
    sw::RunOptions options;
    options.stop_on_hit = false;
    options.keep_history = true;

    std::vector<sw::FieldHistory> histories(n_fields);
    sw::parallel_for(n_fields, cfg.workers, [&](long long i) {
        sw::RunOutput out =
            sw::run_path(params, init, spec, cfg.base_seed + static_cast<std::uint64_t>(i), options);
        histories[i] = std::move(*out.history);
    });
    std::vector<const sw::FieldHistory*> ptrs;
    for (const auto& h : histories) ptrs.push_back(&h);

    nlohmann::json doc;
    for (auto [dir, name] : {std::pair{sw::Direction::space, "space"},
                             std::pair{sw::Direction::time, "time"}}) {
        auto lags = sw::default_lags(dir == sw::Direction::space ? spec.nx : spec.nt);
        sw::HolderEstimate est = sw::holder_estimate(ptrs, dir, lags, moment_p);
        doc[name] = {{"beta_hat", est.beta_hat},
                     {"std_error", est.std_error},
                     {"lags", est.lags_used},
                     {"y_constant", est.y_constant},
                     {"moment_p", moment_p},
                     {"n_fields", n_fields}};
    }
    write_or_print(doc.dump(2) + "\n", cfg.out_path);
    return 0;
}

int cmd_girsanov_check(const CommonOpts& opts, double shift_k, double threshold,
                       int n_paths_arg) {
    sw::ExperimentConfig cfg = load_config(opts);
    const sw::GridSpec spec = cfg.grid();
    const sw::InitialData init = cfg.init.build(spec);
    sw::ModelParams params = cfg.params(cfg.alphas().front());
    params.drift_enabled = false;
    const long long n = n_paths_arg > 0 ? n_paths_arg : cfg.n_paths;
    const sw::DriftShift shift = sw::DriftShift::constant(spec, shift_k);

    std::vector<double> base_f(n), shifted_f(n);
    std::vector<sw::GirsanovWeight> weights(n);
    sw::RunOptions options;
    options.stop_on_hit = false;
    options.keep_history = true;
    sw::parallel_for(n, cfg.workers, [&](long long i) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
        const sw::NoiseGrid noise = sw::NoiseGrid::generate(spec, seed);
        sw::RunOutput base = sw::run_path(params, init, spec, noise, options);
        weights[i] = sw::log_density(noise, shift, spec.nt);
        base_f[i] = sw::mean_process(*base.history).back() < threshold ? 1.0 : 0.0;
        sw::RunOutput direct = sw::run_path(params, init, spec, noise.shifted(shift), options);
        shifted_f[i] = sw::mean_process(*direct.history).back() < threshold ? 1.0 : 0.0;
    });

    std::vector<double> expw(n);
    for (long long i = 0; i < n; ++i) expw[i] = std::exp(weights[i].log_density);
    sw::ReweightResult rew = sw::reweight_estimate(base_f, weights);

    nlohmann::json doc;
    doc["shift_k"] = shift_k;
    doc["n_paths"] = n;
    doc["mean_exp_log_density"] = sw::sample_mean(expw);
    doc["mean_exp_std_error"] = sw::mean_std_error(expw);
    doc["novikov_half_integral"] = weights.empty() ? 0.0 : weights[0].novikov_half_integral;
    doc["functional"] = "indicator(mean field at T < " + std::to_string(threshold) + ")";
    doc["reweighted_estimate"] = rew.estimate;
    doc["reweighted_std_error"] = rew.std_error;
    doc["effective_sample_size"] = rew.effective_sample_size;
    doc["low_ess_warning"] = rew.low_ess_warning;
    doc["direct_shifted_estimate"] = sw::sample_mean(shifted_f);
    doc["direct_shifted_std_error"] = sw::mean_std_error(shifted_f);
    write_or_print(doc.dump(2) + "\n", cfg.out_path);
    return 0;
}

int cmd_diagnose(const CommonOpts& opts, double delta, double sector_eps,
                 double k_bound, double dyadic_eps) {
    sw::ExperimentConfig cfg = load_config(opts);
    const sw::GridSpec spec = cfg.grid();
    const sw::InitialData init = cfg.init.build(spec);
    const sw::ModelParams params = cfg.params(cfg.alphas().front());
    sw::RunOptions options;
    options.hit_level = cfg.hit_level;
    options.keep_history = true;
    sw::RunOutput out = sw::run_path(params, init, spec, cfg.base_seed, options);
    const sw::FieldHistory& history = *out.history;

    nlohmann::json doc;
    doc["seed"] = cfg.base_seed;
    nlohmann::json diag;

    // Cone monotonicity from the last strictly positive slice.
    int apex_step = history.steps_stored;
    while (apex_step > 0 && history.slice_min(apex_step) <= 0.0) --apex_step;
    sw::ConeMonotonicityReport cone =
        sw::cone_monotonicity_check(history, apex_step, spec.nx / 2, params, 100, cfg.base_seed);
    diag["cone_monotonicity"] = {{"apex_step", apex_step},
                                 {"samples", cone.samples},
                                 {"violations", cone.violations},
                                 {"vacuous", cone.vacuous}};

    double k = k_bound;
    if (k <= 0.0) {
        for (int n = 0; n <= history.steps_stored; ++n)
            for (int j = 0; j < spec.nx; ++j) k = std::max(k, history.at(n, j));
        k *= 1.01;
    }
    sw::DyadicReport dyadic = sw::dyadic_counts(history, k, dyadic_eps, 20, params.alpha);
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& c : dyadic.counts)
        counts.push_back({{"n", c.level},
                          {"lambda", c.lambda},
                          {"lattice_points", c.lattice_points},
                          {"count", c.count}});
    diag["dyadic_counts"] = {{"k_bound", k},
                             {"epsilon", dyadic_eps},
                             {"k_too_small", dyadic.k_too_small},
                             {"capped_at", dyadic.capped_at},
                             {"counts", counts},
                             {"weighted_tail", dyadic.weighted_tail}};

    if (params.alpha > 3.0 && delta > 0.0) {
        try {
            sw::SectorReport sector = sw::sector_diagnostic(history, params, delta, sector_eps);
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : sector.rows)
                rows.push_back({{"radius", r.radius},
                                {"bound_rhs", r.bound_rhs},
                                {"forces_negative", r.forces_negative},
                                {"arc_points", r.arc_points},
                                {"max_field_on_arc", r.max_field_on_arc},
                                {"max_vn_increment", r.max_vn_increment},
                                {"annulus_drift", r.annulus_drift}});
            diag["sector"] = {{"delta", sector.delta},
                              {"epsilon", sector.epsilon},
                              {"tau_delta", sector.tau_delta},
                              {"x_delta_index", sector.x_delta_index},
                              {"holder_constant", sector.holder_constant},
                              {"r_star", sector.r_star},
                              {"rows", rows}};
        } catch (const std::exception& e) {
            diag["sector"] = {{"error", e.what()}};
        }
    }

    diag["mean_process"] = sw::mean_process(history);
    doc["diagnostics"] = diag;
    write_or_print(doc.dump(2) + "\n", cfg.out_path);
    return 0;
}

int cmd_kernel_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
        if (!ok) ++failures;
    };
    for (double circle : {1.0, 2.0})
        for (double t : {0.3, 0.7, 1.9}) {
            const int n = 10000;
            double sum = 0.0;
            for (int i = 0; i < n; ++i)
                sum += sw::circle_kernel(t, (i + 0.5) * circle / n, circle) * circle / n;
            double rel = std::abs(sum - sw::kernel_space_integral(t, circle)) / t;
            char name[96];
            std::snprintf(name, sizeof(name), "kernel integral J=%g t=%g (rel err %.2e)",
                          circle, t, rel);
            check(rel < 1e-6, name);
        }
    bool sym = true, per = true;
    for (int i = 0; i < 200; ++i) {
        double t = 0.013 * i, x = 0.37 * i;
        sym = sym && sw::circle_kernel(t, x, 2.0) == sw::circle_kernel(t, -x, 2.0);
        per = per && sw::circle_kernel(t, x, 2.0) == sw::circle_kernel(t, x + 2.0, 2.0);
    }
    check(sym, "kernel symmetry");
    check(per, "kernel periodicity");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochwave: Monte Carlo toolkit for the periodic stochastic wave "
                 "equation with singular drift"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string paths_out, levels_arg;
    int holder_fields = 50, holder_p = 4, girsanov_paths = 0;
    double shift_k = 1.0, threshold = 0.45;
    double delta = 0.0, sector_eps = 0.05, k_bound = 0.0, dyadic_eps = 0.2;

    CLI::App* simulate = app.add_subcommand("simulate", "run one path and dump the field");
    add_common(simulate, opts);
    CLI::App* sweep = app.add_subcommand("sweep", "hit-probability sweep over alphas");
    add_common(sweep, opts);
    sweep->add_option("--paths-out", paths_out, "per-path output file");
    CLI::App* refine = app.add_subcommand("refine", "grid-convergence study with shared noise");
    add_common(refine, opts);
    refine->add_option("--levels", levels_arg, "comma-separated nx levels");
    CLI::App* holder = app.add_subcommand("holder", "Holder exponents of the drift-free field");
    add_common(holder, opts);
    holder->add_option("--fields", holder_fields, "paths pooled into the estimate");
    holder->add_option("--moment", holder_p, "moment order p");
    CLI::App* girsanov = app.add_subcommand("girsanov-check",
                                            "martingale normalization and reweighting check");
    add_common(girsanov, opts);
    girsanov->add_option("--shift-k", shift_k, "constant shift");
    girsanov->add_option("--threshold", threshold, "functional threshold on the mean field");
    girsanov->add_option("--paths", girsanov_paths, "ensemble size (default n_paths)");
    CLI::App* diagnose = app.add_subcommand("diagnose", "sector / cone / dyadic reports");
    add_common(diagnose, opts);
    diagnose->add_option("--delta", delta, "crossing level for the sector diagnostic");
    diagnose->add_option("--sector-eps", sector_eps, "epsilon for the sector bound");
    diagnose->add_option("--k-bound", k_bound, "sup bound K (0 = from the field)");
    diagnose->add_option("--dyadic-eps", dyadic_eps, "epsilon for the dyadic lattice");
    CLI::App* selftest = app.add_subcommand("kernel-selftest", "fast kernel identity checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (sweep->parsed()) return cmd_sweep(opts, paths_out);
        if (refine->parsed()) return cmd_refine(opts, levels_arg);
        if (holder->parsed()) return cmd_holder(opts, holder_fields, holder_p);
        if (girsanov->parsed())
            return cmd_girsanov_check(opts, shift_k, threshold, girsanov_paths);
        if (diagnose->parsed())
            return cmd_diagnose(opts, delta, sector_eps, k_bound, dyadic_eps);
        if (selftest->parsed()) return cmd_kernel_selftest();
    } catch (const sw::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

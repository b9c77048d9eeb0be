#include "stochwave/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace stochwave {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
}

bool to_flag(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config: bad flag for '" + key + "': " + v);
}

}  // namespace

Diffusion parse_diffusion(const std::string& descriptor) {
    auto colon = descriptor.find(':');
    std::string kind = colon == std::string::npos ? descriptor : descriptor.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : descriptor.substr(colon + 1);
    try {
        if (kind == "constant") return Diffusion::constant(std::stod(args));
        if (kind == "bounded_cosine") {
            auto parts = split(args, ',');
            if (parts.size() != 2) throw std::invalid_argument(args);
            return Diffusion::bounded_cosine(std::stod(parts[0]), std::stod(parts[1]));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("config: bad diffusion '" + descriptor + "': " + e.what());
    }
    throw ConfigError("config: unknown diffusion kind '" + kind + "'");
}

InitialData InitDescriptor::build(const GridSpec& spec) const {
    switch (kind) {
        case Kind::constant:
            return InitialData::constant(spec, value, velocity);
        case Kind::cosine:
            return InitialData::cosine(spec, value, amplitude, velocity, 0.0);
        case Kind::tabulated:
            return InitialData::tabulated(spec, table_u0, table_u1);
    }
    throw ConfigError("config: unknown initial-data kind");
}

GridSpec ExperimentConfig::grid() const {
    return GridSpec::make(circle_length, nx, horizon);
}

ModelParams ExperimentConfig::params(double alpha_value) const {
    ModelParams p;
    p.alpha = alpha_value;
    p.g = parse_diffusion(g_descriptor);
    p.trunc_level = trunc_level;
    p.drift_enabled = drift_enabled;
    return p;
}

std::vector<double> ExperimentConfig::alphas() const {
    return alpha_list.empty() ? std::vector<double>{alpha} : alpha_list;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse(in);
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (key == "J") cfg.circle_length = to_double(key, value);
        else if (key == "nx") cfg.nx = static_cast<int>(to_int(key, value));
        else if (key == "T") cfg.horizon = to_double(key, value);
        else if (key == "alpha") cfg.alpha = to_double(key, value);
        else if (key == "alpha_list") {
            cfg.alpha_list.clear();
            for (const auto& part : split(value, ','))
                if (!part.empty()) cfg.alpha_list.push_back(to_double(key, part));
        } else if (key == "g") cfg.g_descriptor = value;
        else if (key == "trunc_level") cfg.trunc_level = to_int(key, value);
        else if (key == "drift") cfg.drift_enabled = to_flag(key, value);
        else if (key == "u0") {
            auto colon = value.find(':');
            std::string kind = colon == std::string::npos ? value : value.substr(0, colon);
            std::string args = colon == std::string::npos ? "" : value.substr(colon + 1);
            if (kind == "constant") {
                cfg.init.kind = InitDescriptor::Kind::constant;
                cfg.init.value = to_double(key, args);
            } else if (kind == "cosine") {
                auto parts = split(args, ',');
                if (parts.size() != 2) throw ConfigError("config: u0 = cosine:mean,amp");
                cfg.init.kind = InitDescriptor::Kind::cosine;
                cfg.init.value = to_double(key, parts[0]);
                cfg.init.amplitude = to_double(key, parts[1]);
            } else if (kind == "tabulated") {
                cfg.init.kind = InitDescriptor::Kind::tabulated;
                cfg.init.table_u0.clear();
                for (const auto& part : split(args, ',')) cfg.init.table_u0.push_back(to_double(key, part));
            } else {
                throw ConfigError("config: unknown u0 kind '" + kind + "'");
            }
        } else if (key == "u1") {
            auto colon = value.find(':');
            std::string kind = colon == std::string::npos ? value : value.substr(0, colon);
            std::string args = colon == std::string::npos ? "" : value.substr(colon + 1);
            if (kind == "constant") cfg.init.velocity = to_double(key, args);
            else if (kind == "tabulated") {
                cfg.init.table_u1.clear();
                for (const auto& part : split(args, ',')) cfg.init.table_u1.push_back(to_double(key, part));
            } else throw ConfigError("config: unknown u1 kind '" + kind + "'");
        } else if (key == "n_paths") cfg.n_paths = to_int(key, value);
        else if (key == "base_seed") cfg.base_seed = static_cast<std::uint64_t>(to_int(key, value));
        else if (key == "hit_level") cfg.hit_level = to_double(key, value);
        else if (key == "girsanov_budget") cfg.girsanov_budget = to_double(key, value);
        else if (key == "workers") cfg.workers = static_cast<int>(to_int(key, value));
        else if (key == "out") cfg.out_path = value;
        else if (key == "format") cfg.format = value;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (n_paths < 1) throw ConfigError("config: n_paths must be >= 1");
    for (double a : alphas())
        if (!(a > 0.0)) throw ConfigError("config: alpha values must be positive");
    if (trunc_level < 1) throw ConfigError("config: trunc_level must be >= 1");
    if (format != "csv" && format != "json")
        throw ConfigError("config: format must be csv or json");
    if (workers < 0) throw ConfigError("config: workers must be >= 0");
    try {
        GridSpec spec = grid();
        InitialData init = this->init.build(spec);
        init.validate();
        for (double a : alphas()) params(a).validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace stochwave

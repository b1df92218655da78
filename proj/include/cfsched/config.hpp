#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsched/experiments.hpp"

namespace cfsched {

// Flat key=value config files: UTF-8, '#' comments, blank lines ignored.
// CLI flags override anything read here.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse(item));
    }
    return out;
}

}  // namespace detail

inline std::vector<std::size_t> parse_size_list(const std::string& s) {
    return detail::parse_list<std::size_t>(s, [](const std::string& v) {
        const long long x = std::stoll(v);
        if (x < 0) throw std::invalid_argument("negative value in list: " + v);
        return std::size_t(x);
    });
}

inline std::vector<double> parse_double_list(const std::string& s) {
    return detail::parse_list<double>(s, [](const std::string& v) { return std::stod(v); });
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

// Fill an ExperimentConfig from parsed key=value pairs; unknown keys reject.
inline void apply_config(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "experiment")
                cfg.experiment = experiment_from_name(value);
            else if (key == "L")
                cfg.L_grid = parse_size_list(value);
            else if (key == "M")
                cfg.n_relays = std::stoull(value);
            else if (key == "P")
                cfg.P_grid = parse_double_list(value);
            else if (key == "k")
                cfg.k_override = std::stoull(value);
            else if (key == "trials")
                cfg.trials = std::stoull(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "out")
                cfg.out_path = value;
            else if (key == "threads")
                cfg.threads = std::stoull(value);
            else if (key == "phase_switch")
                cfg.phase_switch = std::stod(value);
            else
                throw std::invalid_argument("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad value for config key '" + key + "': " + value);
        }
    }
}

}  // namespace cfsched

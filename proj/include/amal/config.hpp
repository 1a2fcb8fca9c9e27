#ifndef AMAL_CONFIG_HPP
#define AMAL_CONFIG_HPP

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "amal/pipeline.hpp"

namespace amal {

/// `key = value` lines; blank lines and '#' comments ignored.
inline std::map<std::string, std::string> parse_config_file(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t");
        std::size_t b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

/// Applies config-file keys onto pipeline options; flags override afterwards.
inline void apply_config(const std::map<std::string, std::string>& kv, PipelineOptions& opt) {
    auto getd = [&](const std::string& k, double& target) {
        auto it = kv.find(k);
        if (it != kv.end()) target = std::stod(it->second);
    };
    auto geti = [&](const std::string& k, int& target) {
        auto it = kv.find(k);
        if (it != kv.end()) target = std::stoi(it->second);
    };
    getd("p_joint", opt.align.p_joint);
    getd("eta", opt.align.eta);
    getd("p_rest", opt.align.p_rest);
    getd("rho_gap", opt.align.rho_gap);
    getd("eta_decay", opt.align.eta_decay);
    geti("median_window", opt.align.median_window);
    geti("pyramid_levels", opt.align.pyramid_levels);
    getd("alpha_a", opt.weights.alpha_a);
    getd("alpha_n", opt.weights.alpha_n);
    getd("alpha_t", opt.weights.alpha_t);
    getd("gamma", opt.weights.gamma);
    getd("epsilon", opt.weights.epsilon);
    getd("lambda", opt.weights.lambda);
    getd("rho_unstable", opt.weights.rho_unstable);
    getd("xi", opt.weights.xi);
    getd("alpha_decay", opt.weights.alpha_decay);
    getd("d_cap", opt.weights.d_cap);
    auto it = kv.find("warp");
    if (it != kv.end()) {
        if (it->second == "poi") opt.warp = WarpMethod::Poi;
        else if (it->second == "dtw") opt.warp = WarpMethod::Dtw;
        else if (it->second == "none") opt.warp = WarpMethod::None;
        else throw std::runtime_error("warp must be poi, dtw or none");
    }
}

}  // namespace amal

#endif

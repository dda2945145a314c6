#include "daf/scenario.hpp"

#include <stdexcept>

#include "daf/channel.hpp"

namespace daf {

namespace {
bool doppler_ok(double f) { return f >= 0.0 && f < 0.5; }
}  // namespace

std::vector<std::string> ScenarioConfig::validation_issues() const {
    std::vector<std::string> issues;
    if (R < 0) issues.push_back("R: relay count must be >= 0");
    if (M < 2 || (M & (M - 1)) != 0)
        issues.push_back("M: constellation size must be a power of two >= 2");
    if (!doppler_ok(f_sd)) issues.push_back("f_sd: outside [0, 0.5)");
    if (static_cast<int>(f_sr.size()) != R)
        issues.push_back("f_sr: need exactly R entries");
    if (static_cast<int>(f_rd.size()) != R)
        issues.push_back("f_rd: need exactly R entries");
    for (std::size_t i = 0; i < f_sr.size(); ++i)
        if (!doppler_ok(f_sr[i])) issues.push_back("f_sr: entry outside [0, 0.5)");
    for (std::size_t i = 0; i < f_rd.size(); ++i)
        if (!doppler_ok(f_rd[i])) issues.push_back("f_rd: entry outside [0, 0.5)");
    if (spacing_n < 1) issues.push_back("spacing_n: must be >= 1");
    if (frame_length < 1) issues.push_back("frame_length: must be >= 1");
    return issues;
}

void ScenarioConfig::validate() const {
    const auto issues = validation_issues();
    if (issues.empty()) return;
    std::string msg = "invalid scenario config:";
    for (const auto& i : issues) msg += "\n  - " + i;
    throw std::invalid_argument(msg);
}

double ScenarioConfig::alpha_sd() const {
    return channel::jakes_autocorrelation(f_sd, spacing_n);
}

double ScenarioConfig::alpha_sr(int relay) const {
    return channel::jakes_autocorrelation(f_sr.at(relay), spacing_n);
}

double ScenarioConfig::alpha_rd(int relay) const {
    return channel::jakes_autocorrelation(f_rd.at(relay), spacing_n);
}

double ScenarioConfig::alpha_cascaded(int relay) const {
    return alpha_sr(relay) * alpha_rd(relay);
}

std::vector<double> ScenarioConfig::cascaded_alphas() const {
    std::vector<double> out(R);
    for (int i = 0; i < R; ++i) out[i] = alpha_cascaded(i);
    return out;
}

ScenarioConfig scenario_preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    double f_sd = 0.0, f_sr = 0.0, f_rd = 0.0;
    if (name == "scenario_I") {
        f_sd = f_sr = f_rd = 0.005;
    } else if (name == "scenario_II") {
        f_sd = f_sr = 0.05;
        f_rd = 0.005;
    } else if (name == "scenario_III") {
        f_sd = f_sr = 0.1;
        f_rd = 0.05;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    cfg.f_sd = f_sd;
    cfg.f_sr.assign(cfg.R, f_sr);
    cfg.f_rd.assign(cfg.R, f_rd);
    return cfg;
}

}  // namespace daf

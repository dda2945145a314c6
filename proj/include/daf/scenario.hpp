// scenario.hpp - experiment configuration shared by the link simulator
// and the orchestration layer.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace daf {

enum class ChannelGenerator { Ar1, JakesSos };

// One simulation setup: relay topology, constellation, per-link fade
// rates, transmission spacing and reproducibility seed.
struct ScenarioConfig {
    std::string name = "custom";
    int R = 2;  // relay count
    int M = 2;  // PSK constellation size
    double f_sd = 0.005;
    std::vector<double> f_sr;  // one entry per relay
    std::vector<double> f_rd;  // one entry per relay
    int spacing_n = 1;         // 1 block-by-block, R+1 symbol-by-symbol
    ChannelGenerator generator = ChannelGenerator::Ar1;
    std::size_t frame_length = 1000;  // data symbols per frame (plus reference)
    std::uint64_t seed = 1;

    // Not a config-file key; lets tests force a noiseless link.
    bool noise_enabled = true;

    /// All invariant violations, empty when valid.
    std::vector<std::string> validation_issues() const;
    /// Throws std::invalid_argument listing every violation at once.
    void validate() const;

    double alpha_sd() const;            // J0(2 pi f_sd n)
    double alpha_sr(int relay) const;   // J0(2 pi f_sr_i n)
    double alpha_rd(int relay) const;   // J0(2 pi f_rd_i n)
    double alpha_cascaded(int relay) const;
    std::vector<double> cascaded_alphas() const;
};

/// Table-I presets by name: scenario_I, scenario_II, scenario_III
/// (relay count and constellation default to R = 2, M = 2).
ScenarioConfig scenario_preset(const std::string& name);

}  // namespace daf

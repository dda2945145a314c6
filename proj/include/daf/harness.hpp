// harness.hpp - experiment orchestration: scenario configuration files,
// BER sweeps over a power grid, envelope-statistics experiments and CSV
// output for plotting.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "daf/analysis.hpp"
#include "daf/channel.hpp"
#include "daf/phylink.hpp"
#include "daf/scenario.hpp"

namespace daf::harness {

// Config parsing or validation failure with every issue listed.
struct ConfigError : std::runtime_error {
    std::vector<std::string> issues;
    explicit ConfigError(const std::vector<std::string>& issues_);
};

/// Parses flat key=value text ('#' starts a comment, lists are
/// comma-separated).  Recognized keys: preset, name, R, M, f_sd, f_sr,
/// f_rd, spacing_n, generator, frame_length, seed.  Unknown keys and all
/// invariant violations are reported together.
ScenarioConfig parse_config_text(const std::string& text);

/// parse_config_text over the contents of a file.
ScenarioConfig load_config(const std::string& path);

struct BerPoint {
    double P_dB = 0.0;
    double ber_sim_tvd = std::numeric_limits<double>::quiet_NaN();
    double ber_sim_cdd = std::numeric_limits<double>::quiet_NaN();
    double ber_theory_lb = 0.0;
    double ber_upper_bound = 0.0;
    double floor = 0.0;
    std::uint64_t n_bits = 0;
    std::uint64_t n_errors_tvd = 0;
    std::uint64_t n_errors_cdd = 0;
    double ber_sim_opt = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t n_errors_opt = 0;
};

struct BerCurve {
    std::vector<BerPoint> points;
    bool has_optimum = false;  // appends the optimum-weight columns
};

struct SweepOptions {
    bool sim_tvd = true;
    bool sim_cdd = true;
    bool sim_optimum = false;
    std::uint64_t early_stop_errors = phy::kDefaultEarlyStopErrors;
    int quadrature_nodes = 64;
    int workers = 1;
};

/// Analysis inputs for a configured scenario and power split.
analysis::PepInputs pep_inputs_from(const ScenarioConfig& cfg,
                                    const phy::PowerAllocation& alloc,
                                    int quadrature_nodes = 64);

/// Simulated and analytical error rates over a strictly increasing power
/// grid; deterministic in (cfg, grid, bits_per_point, seed).
BerCurve run_ber_sweep(const ScenarioConfig& cfg, std::span<const double> P_grid_dB,
                       std::uint64_t bits_per_point, std::uint64_t seed,
                       const SweepOptions& options = {});

// Binned envelope statistics of the cascaded channel in both recursions,
// 100 bins on [0, 5].
struct PdfExperiment {
    channel::Histogram h_exact{0.0, 5.0, 100};
    channel::Histogram h_model{0.0, 5.0, 100};
    channel::Histogram delta_exact{0.0, 5.0, 100};
    channel::Histogram delta_model{0.0, 5.0, 100};
};

/// Ensemble statistics of |h_i|, |Delta_i| and the reduced innovation for
/// relay 0 of the scenario; samples >= 1e5.
PdfExperiment run_pdf_experiment(const ScenarioConfig& cfg, std::size_t samples,
                                 std::uint64_t seed);

/// Columns: bin_center, h_exact, h_model, delta_exact, delta_model, theory.
void emit_pdf_csv(const PdfExperiment& experiment, const std::string& path);

/// Fixed column order, 9 significant digits, byte-stable for equal input.
void emit_curve_csv(const BerCurve& curve, const std::string& path);

/// Inverse of emit_curve_csv.
BerCurve parse_curve_csv(const std::string& path);

/// Small gnuplot script that renders the sweep CSV next to it.
void emit_gnuplot_script(const std::string& csv_path, const std::string& script_path);

}  // namespace daf::harness

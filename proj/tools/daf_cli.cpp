// daf - command line front end for the relay-network BER toolkit.
//
// Verbs:
//   sweep    simulated + analytical BER curves over a power grid -> CSV
//   analyze  analytical curves only (fast)
//   pdf      cascaded-channel envelope statistics -> CSV
//   floor    print the analytical error floor for a configuration
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "daf/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    int relays = -1;
    int mod = -1;
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    auto* cfg = cmd->add_option("--config", args.config_path, "scenario config file");
    auto* preset =
        cmd->add_option("--preset", args.preset,
                        "preset name: scenario_I, scenario_II or scenario_III");
    cfg->excludes(preset);
    cmd->add_option("--relays", args.relays, "relay count override");
    cmd->add_option("--mod", args.mod, "constellation size override (2 or 4)");
    cmd->add_option("--seed", args.seed, "base random seed");
}

daf::ScenarioConfig resolve_config(const CommonArgs& args) {
    daf::ScenarioConfig cfg;
    if (!args.config_path.empty())
        cfg = daf::harness::load_config(args.config_path);
    else if (!args.preset.empty())
        cfg = daf::scenario_preset(args.preset);
    else
        throw daf::harness::ConfigError({"need --config or --preset"});

    if (args.relays >= 0) {
        cfg.R = args.relays;
        if (!cfg.f_sr.empty()) cfg.f_sr.assign(cfg.R, cfg.f_sr.front());
        if (!cfg.f_rd.empty()) cfg.f_rd.assign(cfg.R, cfg.f_rd.front());
    }
    if (args.mod > 0) cfg.M = args.mod;
    cfg.seed = args.seed;
    cfg.validate();
    return cfg;
}

std::vector<double> power_grid(double pmin, double pmax, double pstep) {
    if (pstep <= 0.0 || pmax < pmin)
        throw daf::harness::ConfigError({"bad power grid: need pmin <= pmax, pstep > 0"});
    std::vector<double> grid;
    for (double p = pmin; p <= pmax + 1e-9; p += pstep) grid.push_back(p);
    return grid;
}

int run_sweep(const CommonArgs& common, double pmin, double pmax, double pstep,
              std::uint64_t bits, const std::string& scheme, const std::string& out,
              const std::string& gnuplot, int workers, bool analysis_only) {
    const auto cfg = resolve_config(common);
    daf::harness::SweepOptions options;
    options.workers = workers > 0
                          ? workers
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (analysis_only) {
        options.sim_tvd = options.sim_cdd = options.sim_optimum = false;
    } else if (scheme == "tvd") {
        options.sim_cdd = false;
    } else if (scheme == "cdd") {
        options.sim_tvd = false;
    } else if (scheme == "optimum") {
        options.sim_tvd = options.sim_cdd = false;
        options.sim_optimum = true;
    } else if (scheme == "all") {
        options.sim_optimum = true;
    } else {
        throw daf::harness::ConfigError(
            {"--scheme must be one of tvd, cdd, optimum, all"});
    }

    const auto grid = power_grid(pmin, pmax, pstep);
    const auto curve = daf::harness::run_ber_sweep(cfg, grid, bits, cfg.seed, options);
    daf::harness::emit_curve_csv(curve, out);
    if (!gnuplot.empty()) daf::harness::emit_gnuplot_script(out, gnuplot);

    std::printf("# %s R=%d M=%d -> %s\n", cfg.name.c_str(), cfg.R, cfg.M, out.c_str());
    for (const auto& p : curve.points)
        std::printf("P=%5.1f dB  tvd=%.3e  cdd=%.3e  theory_lb=%.3e  floor=%.3e\n",
                    p.P_dB, p.ber_sim_tvd, p.ber_sim_cdd, p.ber_theory_lb, p.floor);
    return 0;
}

int run_pdf(const CommonArgs& common, std::size_t samples, const std::string& out) {
    const auto cfg = resolve_config(common);
    const auto exp = daf::harness::run_pdf_experiment(cfg, samples, cfg.seed);
    daf::harness::emit_pdf_csv(exp, out);
    std::printf("# %s: %zu samples -> %s\n", cfg.name.c_str(), samples, out.c_str());
    return 0;
}

int run_floor(const CommonArgs& common) {
    const auto cfg = resolve_config(common);
    const auto gbars = daf::analysis::GammaBarSet::from_alphas(cfg.alpha_sd(),
                                                               cfg.cascaded_alphas());
    const double dmin2 = daf::phy::ConstellationSpec(cfg.M).dmin2();
    std::printf("scenario %s: R=%d M=%d\n", cfg.name.c_str(), cfg.R, cfg.M);
    std::printf("alpha_sd = %.9g, gamma_bar_0 = %.9g\n", cfg.alpha_sd(), gbars.gbar0);
    for (int i = 0; i < cfg.R; ++i)
        std::printf("relay %d: alpha = %.9g, gamma_bar = %.9g\n", i,
                    cfg.alpha_cascaded(i), gbars.gbari[i]);
    const auto floor = daf::analysis::error_floor(gbars, dmin2);
    if (!floor.exists) {
        std::printf("no floor (static link)\n");
        return 0;
    }
    std::printf("PEP floor      = %.9g\n", floor.value);
    std::printf("BER floor      = %.9g\n",
                daf::analysis::ber_from_pep(floor.value, cfg.M));
    std::printf("quadrature ref = %.9g\n",
                daf::analysis::floor_from_quadrature(gbars, dmin2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differential amplify-and-forward relay link simulator"};
    app.require_subcommand(1);

    CommonArgs sweep_args, analyze_args, pdf_args, floor_args;
    double pmin = 0.0, pmax = 40.0, pstep = 5.0;
    std::uint64_t bits = 2'000'000;
    std::string scheme = "all", out = "curve.csv", gnuplot;
    int workers = 0;

    auto* sweep = app.add_subcommand("sweep", "simulate BER curves over a power grid");
    add_common(sweep, sweep_args);
    sweep->add_option("--pmin", pmin, "grid start, dB");
    sweep->add_option("--pmax", pmax, "grid end, dB");
    sweep->add_option("--pstep", pstep, "grid step, dB");
    sweep->add_option("--bits", bits, "bit budget per grid point");
    sweep->add_option("--scheme", scheme, "tvd | cdd | optimum | all");
    sweep->add_option("--out", out, "output CSV path");
    sweep->add_option("--gnuplot", gnuplot, "also write a gnuplot script");
    sweep->add_option("--workers", workers, "worker threads (0 = hardware)");

    double a_pmin = 0.0, a_pmax = 40.0, a_pstep = 1.0;
    std::string a_out = "theory.csv";
    auto* analyze = app.add_subcommand("analyze", "analytical curves only");
    add_common(analyze, analyze_args);
    analyze->add_option("--pmin", a_pmin, "grid start, dB");
    analyze->add_option("--pmax", a_pmax, "grid end, dB");
    analyze->add_option("--pstep", a_pstep, "grid step, dB");
    analyze->add_option("--out", a_out, "output CSV path");

    std::size_t samples = 1'000'000;
    std::string pdf_out = "pdf.csv";
    auto* pdf = app.add_subcommand("pdf", "cascaded-channel envelope statistics");
    add_common(pdf, pdf_args);
    pdf->add_option("--samples", samples, "ensemble size (>= 1e5)");
    pdf->add_option("--out", pdf_out, "output CSV path");

    auto* floor = app.add_subcommand("floor", "print the analytical error floor");
    add_common(floor, floor_args);

    try {
        app.parse(argc, argv);
        if (sweep->parsed())
            return run_sweep(sweep_args, pmin, pmax, pstep, bits, scheme, out, gnuplot,
                             workers, false);
        if (analyze->parsed())
            return run_sweep(analyze_args, a_pmin, a_pmax, a_pstep, 0, "all", a_out, "",
                             1, true);
        if (pdf->parsed()) return run_pdf(pdf_args, samples, pdf_out);
        if (floor->parsed()) return run_floor(floor_args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const daf::harness::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
    return 0;
}

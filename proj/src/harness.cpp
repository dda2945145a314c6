#include "daf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace daf::harness {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string msg = "config error:";
    for (const auto& i : issues) msg += "\n  - " + i;
    return msg;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && !s.empty();
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    char* end = nullptr;
    out = std::strtoull(s.c_str(), &end, 10);
    return end && *end == '\0' && !s.empty();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& issues_)
    : std::runtime_error(join_issues(issues_)), issues(issues_) {}

ScenarioConfig parse_config_text(const std::string& text) {
    std::vector<std::string> issues;
    std::map<std::string, std::string> kv;
    std::vector<std::string> order;

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(line_no) + ": expected key=value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kv.count(key))
            issues.push_back("line " + std::to_string(line_no) + ": duplicate key '" +
                             key + "'");
        kv[key] = value;
        order.push_back(key);
    }

    static const char* known[] = {"preset",    "name",   "R",          "M",
                                  "f_sd",      "f_sr",   "f_rd",       "spacing_n",
                                  "generator", "frame_length", "seed"};
    for (const auto& [key, value] : kv) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok |= (key == k);
        if (!ok) issues.push_back("unknown key '" + key + "'");
    }

    ScenarioConfig cfg;
    if (kv.count("preset")) {
        try {
            cfg = scenario_preset(kv["preset"]);
        } catch (const std::invalid_argument& e) {
            issues.push_back(e.what());
        }
    }

    bool f_sr_given = kv.count("f_sr") > 0, f_rd_given = kv.count("f_rd") > 0;

    if (kv.count("name")) cfg.name = kv["name"];
    if (kv.count("R")) {
        std::uint64_t r;
        if (parse_u64(kv["R"], r))
            cfg.R = static_cast<int>(r);
        else
            issues.push_back("R: not an integer: '" + kv["R"] + "'");
    }
    if (kv.count("M")) {
        std::uint64_t m;
        if (parse_u64(kv["M"], m))
            cfg.M = static_cast<int>(m);
        else
            issues.push_back("M: not an integer: '" + kv["M"] + "'");
    }
    if (kv.count("f_sd")) {
        double f;
        if (parse_double(kv["f_sd"], f))
            cfg.f_sd = f;
        else
            issues.push_back("f_sd: not a number: '" + kv["f_sd"] + "'");
    }
    auto parse_list = [&](const char* key, std::vector<double>& out) {
        out.clear();
        for (const auto& part : split_list(kv[key])) {
            double f;
            if (parse_double(part, f))
                out.push_back(f);
            else
                issues.push_back(std::string(key) + ": not a number: '" + part + "'");
        }
    };
    if (f_sr_given) parse_list("f_sr", cfg.f_sr);
    if (f_rd_given) parse_list("f_rd", cfg.f_rd);
    if (kv.count("spacing_n")) {
        std::uint64_t n;
        if (parse_u64(kv["spacing_n"], n))
            cfg.spacing_n = static_cast<int>(n);
        else
            issues.push_back("spacing_n: not an integer");
    }
    if (kv.count("generator")) {
        const auto& g = kv["generator"];
        if (g == "ar1")
            cfg.generator = ChannelGenerator::Ar1;
        else if (g == "jakes_sos")
            cfg.generator = ChannelGenerator::JakesSos;
        else
            issues.push_back("generator: expected 'ar1' or 'jakes_sos', got '" + g + "'");
    }
    if (kv.count("frame_length")) {
        std::uint64_t n;
        if (parse_u64(kv["frame_length"], n) && n > 0)
            cfg.frame_length = n;
        else
            issues.push_back("frame_length: not a positive integer");
    }
    if (kv.count("seed")) {
        std::uint64_t s;
        if (parse_u64(kv["seed"], s))
            cfg.seed = s;
        else
            issues.push_back("seed: not an integer");
    }

    // A preset provides uniform per-relay rates; follow a changed relay
    // count unless explicit lists were supplied.
    if (kv.count("preset")) {
        if (!f_sr_given && !cfg.f_sr.empty())
            cfg.f_sr.assign(cfg.R, cfg.f_sr.front());
        if (!f_rd_given && !cfg.f_rd.empty())
            cfg.f_rd.assign(cfg.R, cfg.f_rd.front());
    }

    for (const auto& issue : cfg.validation_issues()) issues.push_back(issue);
    if (!issues.empty()) throw ConfigError(issues);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

analysis::PepInputs pep_inputs_from(const ScenarioConfig& cfg,
                                    const phy::PowerAllocation& alloc,
                                    int quadrature_nodes) {
    analysis::PepInputs inputs;
    inputs.alpha0 = cfg.alpha_sd();
    inputs.alphai = cfg.cascaded_alphas();
    inputs.A.resize(cfg.R);
    for (int i = 0; i < cfg.R; ++i)
        inputs.A[i] = phy::amplification_factor(alloc.Pi[i], alloc.P0);
    inputs.P0 = alloc.P0;
    inputs.dmin2 = phy::ConstellationSpec(cfg.M).dmin2();
    inputs.quadrature_nodes = quadrature_nodes;
    return inputs;
}

BerCurve run_ber_sweep(const ScenarioConfig& cfg, std::span<const double> P_grid_dB,
                       std::uint64_t bits_per_point, std::uint64_t seed,
                       const SweepOptions& options) {
    cfg.validate();
    if (P_grid_dB.empty()) throw std::invalid_argument("run_ber_sweep: empty grid");
    for (std::size_t i = 1; i < P_grid_dB.size(); ++i)
        if (!(P_grid_dB[i] > P_grid_dB[i - 1]))
            throw std::invalid_argument("run_ber_sweep: grid must strictly increase");

    std::vector<phy::CombinerScheme> schemes;
    if (options.sim_tvd) schemes.push_back(phy::CombinerScheme::Tvd);
    if (options.sim_cdd) schemes.push_back(phy::CombinerScheme::Cdd);
    if (options.sim_optimum) schemes.push_back(phy::CombinerScheme::Optimum);

    // The floor depends only on fade rates and the constellation.
    const auto gbars =
        analysis::GammaBarSet::from_alphas(cfg.alpha_sd(), cfg.cascaded_alphas());
    const double dmin2 = phy::ConstellationSpec(cfg.M).dmin2();
    const auto floor = analysis::error_floor(gbars, dmin2);
    const double floor_ber = analysis::ber_from_pep(floor.value, cfg.M);

    BerCurve curve;
    curve.has_optimum = options.sim_optimum;
    for (std::size_t p = 0; p < P_grid_dB.size(); ++p) {
        const double P = std::pow(10.0, P_grid_dB[p] / 10.0);
        const auto alloc = phy::PowerAllocation::equal_split(P, cfg.R);
        const auto inputs = pep_inputs_from(cfg, alloc, options.quadrature_nodes);

        BerPoint point;
        point.P_dB = P_grid_dB[p];
        point.ber_theory_lb =
            analysis::ber_from_pep(analysis::pep_unconditional(inputs), cfg.M);
        point.ber_upper_bound =
            analysis::ber_from_pep(analysis::pep_upper_bound(inputs), cfg.M);
        point.floor = floor_ber;

        if (!schemes.empty()) {
            const auto counts = phy::ber_montecarlo_paired(
                cfg, alloc, schemes, bits_per_point, math::Rng::derive(seed, p),
                options.early_stop_errors, options.workers);
            std::size_t s = 0;
            if (options.sim_tvd) {
                point.ber_sim_tvd = counts.rate(s);
                point.n_errors_tvd = counts.per_scheme[s].bit_errors;
                point.n_bits = counts.per_scheme[s].bits;
                ++s;
            }
            if (options.sim_cdd) {
                point.ber_sim_cdd = counts.rate(s);
                point.n_errors_cdd = counts.per_scheme[s].bit_errors;
                point.n_bits = counts.per_scheme[s].bits;
                ++s;
            }
            if (options.sim_optimum) {
                point.ber_sim_opt = counts.rate(s);
                point.n_errors_opt = counts.per_scheme[s].bit_errors;
                point.n_bits = counts.per_scheme[s].bits;
            }
        }
        curve.points.push_back(point);
    }
    return curve;
}

PdfExperiment run_pdf_experiment(const ScenarioConfig& cfg, std::size_t samples,
                                 std::uint64_t seed) {
    cfg.validate();
    if (cfg.R < 1)
        throw std::invalid_argument("run_pdf_experiment: need at least one relay");
    if (samples < 100'000)
        throw std::invalid_argument("run_pdf_experiment: need at least 1e5 samples");

    const double asr = cfg.alpha_sr(0);
    const double ard = cfg.alpha_rd(0);
    PdfExperiment exp;
    for (std::size_t k = 0; k < samples; ++k) {
        const auto exact = channel::cascaded_stationary_pair(
            channel::CascadedChannelSimulator::Mode::Exact, asr, ard,
            math::Rng::derive(seed, 1, k));
        exp.h_exact.add(std::abs(exact.h1));
        exp.delta_exact.add(std::abs(exact.delta));
        const auto model = channel::cascaded_stationary_pair(
            channel::CascadedChannelSimulator::Mode::Model, asr, ard,
            math::Rng::derive(seed, 2, k));
        exp.h_model.add(std::abs(model.h1));
        exp.delta_model.add(std::abs(model.delta));
    }
    return exp;
}

namespace {

FILE* open_or_throw(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

}  // namespace

void emit_pdf_csv(const PdfExperiment& exp, const std::string& path) {
    FILE* f = open_or_throw(path);
    std::fputs("bin_center,h_exact,h_model,delta_exact,delta_model,theory\n", f);
    for (std::size_t b = 0; b < exp.h_exact.counts.size(); ++b) {
        const double center = exp.h_exact.bin_center(b);
        std::fprintf(f, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", center,
                     exp.h_exact.density(b), exp.h_model.density(b),
                     exp.delta_exact.density(b), exp.delta_model.density(b),
                     channel::envelope_pdf(center));
    }
    std::fclose(f);
}

void emit_curve_csv(const BerCurve& curve, const std::string& path) {
    FILE* f = open_or_throw(path);
    std::fputs(
        "P_dB,ber_sim_tvd,ber_sim_cdd,ber_theory_lb,ber_upper_bound,floor,"
        "n_bits,n_errors_tvd,n_errors_cdd",
        f);
    if (curve.has_optimum) std::fputs(",ber_sim_opt,n_errors_opt", f);
    std::fputs("\n", f);
    for (const auto& p : curve.points) {
        std::fprintf(f, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%llu,%llu,%llu", p.P_dB,
                     p.ber_sim_tvd, p.ber_sim_cdd, p.ber_theory_lb, p.ber_upper_bound,
                     p.floor, static_cast<unsigned long long>(p.n_bits),
                     static_cast<unsigned long long>(p.n_errors_tvd),
                     static_cast<unsigned long long>(p.n_errors_cdd));
        if (curve.has_optimum)
            std::fprintf(f, ",%.9g,%llu", p.ber_sim_opt,
                         static_cast<unsigned long long>(p.n_errors_opt));
        std::fputs("\n", f);
    }
    std::fclose(f);
}

BerCurve parse_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty csv: " + path);

    BerCurve curve;
    curve.has_optimum = header.find("ber_sim_opt") != std::string::npos;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_list(line);
        const std::size_t expected = curve.has_optimum ? 11 : 9;
        if (cells.size() != expected)
            throw std::runtime_error("csv row has wrong column count: " + line);
        BerPoint p;
        std::size_t c = 0;
        auto num = [&](double& out) { out = std::strtod(cells[c++].c_str(), nullptr); };
        auto u64 = [&](std::uint64_t& out) {
            out = std::strtoull(cells[c++].c_str(), nullptr, 10);
        };
        num(p.P_dB);
        num(p.ber_sim_tvd);
        num(p.ber_sim_cdd);
        num(p.ber_theory_lb);
        num(p.ber_upper_bound);
        num(p.floor);
        u64(p.n_bits);
        u64(p.n_errors_tvd);
        u64(p.n_errors_cdd);
        if (curve.has_optimum) {
            num(p.ber_sim_opt);
            u64(p.n_errors_opt);
        }
        curve.points.push_back(p);
    }
    return curve;
}

void emit_gnuplot_script(const std::string& csv_path, const std::string& script_path) {
    FILE* f = open_or_throw(script_path);
    std::fprintf(f,
                 "set datafile separator ','\n"
                 "set logscale y\n"
                 "set xlabel 'P (dB)'\n"
                 "set ylabel 'BER'\n"
                 "set grid\n"
                 "set key left bottom\n"
                 "plot '%s' using 1:2 with linespoints title 'TVD (sim)', \\\n"
                 "     '%s' using 1:3 with linespoints title 'CDD (sim)', \\\n"
                 "     '%s' using 1:4 with lines dashtype 2 title 'lower bound', \\\n"
                 "     '%s' using 1:6 with lines dashtype 3 title 'floor'\n",
                 csv_path.c_str(), csv_path.c_str(), csv_path.c_str(), csv_path.c_str());
    std::fclose(f);
}

}  // namespace daf::harness

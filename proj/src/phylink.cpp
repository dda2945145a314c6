#include "daf/phylink.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace daf::phy {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ConstellationSpec::ConstellationSpec(int M_) : M(M_) {
    if (M < 2 || (M & (M - 1)) != 0)
        throw std::invalid_argument("ConstellationSpec: M must be a power of two >= 2");
    bits_per_symbol = std::countr_zero(static_cast<unsigned>(M));
    points_.resize(M);
    for (int m = 0; m < M; ++m) {
        const double phase = 2.0 * kPi * m / M;
        points_[m] = {std::cos(phase), std::sin(phase)};
    }
}

double ConstellationSpec::dmin2() const {
    const double s = std::sin(kPi / M);
    return 4.0 * s * s;
}

unsigned ConstellationSpec::gray_decode(unsigned g) {
    unsigned m = g;
    for (unsigned shift = 1; shift < 32; shift <<= 1) m ^= m >> shift;
    return m;
}

int ConstellationSpec::index_from_bits(unsigned bits) const {
    return static_cast<int>(gray_decode(bits)) & (M - 1);
}

ComplexSeries differential_encode(std::span<const Complex> v) {
    for (const auto& x : v)
        if (std::fabs(std::abs(x) - 1.0) > 1e-9)
            throw std::invalid_argument("differential_encode: non-unit-modulus symbol");
    ComplexSeries s(v.size() + 1);
    s[0] = {1.0, 0.0};
    for (std::size_t k = 0; k < v.size(); ++k) s[k + 1] = v[k] * s[k];
    return s;
}

double amplification_factor(double Pi, double P0) {
    if (Pi < 0.0 || P0 < 0.0)
        throw std::invalid_argument("amplification_factor: negative power");
    return std::sqrt(Pi / (P0 + 1.0));
}

PowerAllocation PowerAllocation::equal_split(double total_P, int relays) {
    if (total_P < 0.0 || relays < 0)
        throw std::invalid_argument("PowerAllocation: negative inputs");
    PowerAllocation alloc;
    alloc.total_P = total_P;
    if (relays == 0) {
        alloc.P0 = total_P;
        return alloc;
    }
    alloc.P0 = total_P / 2.0;
    alloc.Pi.assign(relays, total_P / (2.0 * relays));
    return alloc;
}

void PowerAllocation::validate() const {
    double sum = P0;
    for (double p : Pi) {
        if (p < 0.0) throw std::invalid_argument("PowerAllocation: negative relay power");
        sum += p;
    }
    if (P0 < 0.0) throw std::invalid_argument("PowerAllocation: negative source power");
    if (std::fabs(sum - total_P) > 1e-9 * std::max(1.0, total_P))
        throw std::invalid_argument("PowerAllocation: powers do not sum to total_P");
}

CombinerWeights weights_cdd(std::span<const double> A) {
    CombinerWeights w;
    w.scheme = CombinerScheme::Cdd;
    w.b0 = 0.5;
    w.A.assign(A.begin(), A.end());
    w.bi.resize(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i] < 0.0) throw std::invalid_argument("weights_cdd: negative gain");
        w.bi[i] = 1.0 / (2.0 * (1.0 + A[i] * A[i]));
    }
    w.alphai.assign(A.size(), 1.0);
    return w;
}

CombinerWeights weights_tvd(double alpha0, std::span<const double> alphai,
                            std::span<const double> A, double P0) {
    if (alphai.size() != A.size())
        throw std::invalid_argument("weights_tvd: alpha/gain size mismatch");
    CombinerWeights w;
    w.scheme = CombinerScheme::Tvd;
    w.alpha0 = alpha0;
    w.alphai.assign(alphai.begin(), alphai.end());
    w.A.assign(A.begin(), A.end());
    w.P0 = P0;
    w.b0 = alpha0 / (1.0 + alpha0 * alpha0 + (1.0 - alpha0 * alpha0) * P0);
    w.bi.resize(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double a2 = alphai[i] * alphai[i];
        const double A2 = A[i] * A[i];
        w.bi[i] = alphai[i] / ((1.0 + a2) * (1.0 + A2) + (1.0 - a2) * A2 * P0);
    }
    return w;
}

CombinerWeights weights_optimum(double alpha0, std::span<const double> alphai,
                                std::span<const double> A, double P0,
                                std::span<const Complex> h_rd_now) {
    if (h_rd_now.size() != A.size())
        throw std::invalid_argument("weights_optimum: genie gains missing");
    CombinerWeights w = weights_tvd(alpha0, alphai, A, P0);
    w.scheme = CombinerScheme::Optimum;
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double a2 = alphai[i] * alphai[i];
        const double A2 = A[i] * A[i];
        const double eta = std::norm(h_rd_now[i]);
        const double sigma2 = A2 * eta + 1.0;
        const double rho = A2 * P0 * eta / sigma2;
        w.bi[i] = alphai[i] / (sigma2 * (1.0 + a2 + (1.0 - a2) * rho));
    }
    return w;
}

CombinerWeights make_weights(CombinerScheme scheme, const ScenarioConfig& cfg,
                             const PowerAllocation& alloc) {
    std::vector<double> A(cfg.R);
    for (int i = 0; i < cfg.R; ++i) A[i] = amplification_factor(alloc.Pi[i], alloc.P0);
    switch (scheme) {
        case CombinerScheme::Cdd:
            return weights_cdd(A);
        case CombinerScheme::Tvd:
            return weights_tvd(cfg.alpha_sd(), cfg.cascaded_alphas(), A, alloc.P0);
        case CombinerScheme::Optimum: {
            CombinerWeights w =
                weights_tvd(cfg.alpha_sd(), cfg.cascaded_alphas(), A, alloc.P0);
            w.scheme = CombinerScheme::Optimum;
            return w;
        }
    }
    throw std::logic_error("make_weights: unreachable");
}

namespace {

Complex combine_terms(double b0, std::span<const double> bi, Complex y0p, Complex y0n,
                      std::span<const Complex> yip, std::span<const Complex> yin) {
    Complex zeta = b0 * std::conj(y0p) * y0n;
    for (std::size_t i = 0; i < bi.size(); ++i)
        zeta += bi[i] * std::conj(yip[i]) * yin[i];
    return zeta;
}

}  // namespace

Complex combine(const FrameObservation& obs, const CombinerWeights& w, std::size_t k) {
    if (k < 1 || k >= obs.length())
        throw std::out_of_range("combine: index outside [1, length)");
    std::vector<Complex> yip(obs.yi.size()), yin(obs.yi.size());
    for (std::size_t i = 0; i < obs.yi.size(); ++i) {
        yip[i] = obs.yi[i][k - 1];
        yin[i] = obs.yi[i][k];
    }
    if (w.scheme == CombinerScheme::Optimum) {
        if (obs.genie_h_rd.size() != obs.yi.size())
            throw std::invalid_argument("combine: optimum weights need genie gains");
        std::vector<Complex> h(obs.yi.size());
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = obs.genie_h_rd[i][k - 1];
        const CombinerWeights inst = weights_optimum(w.alpha0, w.alphai, w.A, w.P0, h);
        return combine_terms(inst.b0, inst.bi, obs.y0[k - 1], obs.y0[k], yip, yin);
    }
    return combine_terms(w.b0, w.bi, obs.y0[k - 1], obs.y0[k], yip, yin);
}

int detect_min_ed(Complex zeta, const ConstellationSpec& constellation) {
    int best = 0;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < constellation.M; ++m) {
        // argmin |zeta - v|^2 over unit-modulus v equals argmax Re{v* zeta}
        const double metric = zeta.real() * constellation.symbol(m).real() +
                              zeta.imag() * constellation.symbol(m).imag();
        if (metric > best_metric) {
            best_metric = metric;
            best = m;
        }
    }
    return best;
}

FrameSimulator::FrameSimulator(const ScenarioConfig& cfg, const PowerAllocation& alloc,
                               std::uint64_t seed)
    : sqrt_P0_(std::sqrt(alloc.P0)),
      noise_on_(cfg.noise_enabled),
      noise_(math::Rng::derive(seed, 0x6e6f6973)) {
    cfg.validate();
    const auto kind = cfg.generator == ChannelGenerator::Ar1
                          ? channel::FadingProcess::Kind::Ar1
                          : channel::FadingProcess::Kind::JakesSos;
    A_.resize(cfg.R);
    h_sd_.emplace_back(kind, cfg.f_sd, cfg.spacing_n, math::Rng::derive(seed, 1, 0));
    for (int i = 0; i < cfg.R; ++i) {
        A_[i] = amplification_factor(alloc.Pi[i], alloc.P0);
        h_sr_.emplace_back(kind, cfg.f_sr[i], cfg.spacing_n,
                           math::Rng::derive(seed, 2, i));
        h_rd_.emplace_back(kind, cfg.f_rd[i], cfg.spacing_n,
                           math::Rng::derive(seed, 3, i));
    }
    yi_prev_.resize(cfg.R);
    yi_now_.resize(cfg.R);
    h_rd_prev_.resize(cfg.R);
    h_rd_now_.resize(cfg.R);
    receive();  // reference use, s = 1
}

void FrameSimulator::receive() {
    const double noise_var = noise_on_ ? 1.0 : 0.0;
    const Complex h0 = h_sd_[0].next();
    y0_now_ = sqrt_P0_ * h0 * s_ + noise_.next_complex_gaussian(noise_var);
    for (int i = 0; i < relays(); ++i) {
        const Complex h_sr = h_sr_[i].next();
        const Complex h_rd = h_rd_[i].next();
        const Complex y_sr =
            sqrt_P0_ * h_sr * s_ + noise_.next_complex_gaussian(noise_var);
        yi_now_[i] = A_[i] * h_rd * y_sr + noise_.next_complex_gaussian(noise_var);
        h_rd_now_[i] = h_rd;
    }
}

void FrameSimulator::step(Complex v) {
    y0_prev_ = y0_now_;
    yi_prev_ = yi_now_;
    h_rd_prev_ = h_rd_now_;
    s_ *= v;
    receive();
}

FrameObservation simulate_frame(const ScenarioConfig& cfg, const PowerAllocation& alloc,
                                std::span<const unsigned> data_bits,
                                std::uint64_t seed) {
    cfg.validate();
    const ConstellationSpec constellation(cfg.M);
    const int bps = constellation.bits_per_symbol;
    if (data_bits.size() < static_cast<std::size_t>(bps) ||
        data_bits.size() % static_cast<std::size_t>(bps) != 0)
        throw std::invalid_argument("simulate_frame: bit count not a symbol multiple");

    FrameSimulator sim(cfg, alloc, seed);
    FrameObservation obs;
    obs.yi.resize(cfg.R);
    obs.genie_h_rd.resize(cfg.R);
    auto record = [&] {
        obs.y0.push_back(sim.y0_now());
        for (int i = 0; i < cfg.R; ++i) {
            obs.yi[i].push_back(sim.yi_now(i));
            obs.genie_h_rd[i].push_back(sim.h_rd_now(i));
        }
    };
    record();
    for (std::size_t k = 0; k < data_bits.size(); k += bps) {
        unsigned bits = 0;
        for (int b = 0; b < bps; ++b) bits = (bits << 1) | (data_bits[k + b] & 1u);
        sim.step(constellation.symbol(constellation.index_from_bits(bits)));
        record();
    }
    return obs;
}

namespace {

// Ratio-estimator variance over independent chunks: with errors e_c and
// bits b_c per chunk, rate r = sum(e)/sum(b) and
// Var(r) ~ [C/(C-1)] sum((e_c - r b_c)^2) / (sum b)^2.
double cluster_se(std::span<const std::uint64_t> e, std::span<const std::uint64_t> b,
                  std::span<const std::uint64_t> e2) {
    const std::size_t C = e.size();
    double total_bits = 0.0, total_err = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        total_bits += static_cast<double>(b[c]);
        total_err +=
            static_cast<double>(e[c]) - (e2.empty() ? 0.0 : static_cast<double>(e2[c]));
    }
    if (total_bits == 0.0) return 0.0;
    const double r = total_err / total_bits;
    if (C < 2) {
        const double p = std::fabs(r);
        return std::sqrt(std::max(p * (1.0 - p), 0.0) / total_bits);
    }
    double ss = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        const double d =
            static_cast<double>(e[c]) -
            (e2.empty() ? 0.0 : static_cast<double>(e2[c])) -
            r * static_cast<double>(b[c]);
        ss += d * d;
    }
    return std::sqrt(ss * static_cast<double>(C) / static_cast<double>(C - 1)) /
           total_bits;
}

}  // namespace

double PairedBerResult::rate_standard_error(std::size_t scheme) const {
    return cluster_se(chunk_errors[scheme], chunk_bits, {});
}

double PairedBerResult::difference_standard_error(std::size_t a, std::size_t b) const {
    return cluster_se(chunk_errors[a], chunk_bits, chunk_errors[b]);
}

namespace {

// Bit errors for every scheme over one frame, all schemes sharing the
// same channel and noise realization.
void run_frame(const ScenarioConfig& cfg, const PowerAllocation& alloc,
               const ConstellationSpec& constellation,
               std::span<const CombinerWeights> weights, std::uint64_t frame_seed,
               std::span<std::uint64_t> errors) {
    FrameSimulator sim(cfg, alloc, frame_seed);
    math::Rng bits(math::Rng::derive(frame_seed, 0x62697473));
    std::vector<Complex> yip(cfg.R), yin(cfg.R), h_prev(cfg.R);

    for (std::size_t k = 0; k < cfg.frame_length; ++k) {
        const unsigned group =
            static_cast<unsigned>(bits.next_u64()) & (static_cast<unsigned>(cfg.M) - 1u);
        const int m_tx = constellation.index_from_bits(group);
        sim.step(constellation.symbol(m_tx));

        for (int i = 0; i < cfg.R; ++i) {
            yip[i] = sim.yi_prev(i);
            yin[i] = sim.yi_now(i);
            h_prev[i] = sim.h_rd_prev(i);
        }
        for (std::size_t s = 0; s < weights.size(); ++s) {
            Complex zeta;
            if (weights[s].scheme == CombinerScheme::Optimum) {
                const CombinerWeights inst =
                    weights_optimum(weights[s].alpha0, weights[s].alphai, weights[s].A,
                                    weights[s].P0, h_prev);
                zeta =
                    combine_terms(inst.b0, inst.bi, sim.y0_prev(), sim.y0_now(), yip, yin);
            } else {
                zeta = combine_terms(weights[s].b0, weights[s].bi, sim.y0_prev(),
                                     sim.y0_now(), yip, yin);
            }
            const int m_rx = detect_min_ed(zeta, constellation);
            errors[s] += std::popcount(ConstellationSpec::gray_encode(m_tx) ^
                                       ConstellationSpec::gray_encode(m_rx));
        }
    }
}

}  // namespace

PairedBerResult ber_montecarlo_paired(const ScenarioConfig& cfg,
                                      const PowerAllocation& alloc,
                                      std::span<const CombinerScheme> schemes,
                                      std::uint64_t n_bits, std::uint64_t seed,
                                      std::uint64_t early_stop_errors, int workers) {
    cfg.validate();
    alloc.validate();
    if (schemes.empty()) throw std::invalid_argument("ber_montecarlo: no schemes");
    if (workers < 1) workers = 1;

    const ConstellationSpec constellation(cfg.M);
    std::vector<CombinerWeights> weights;
    for (const auto s : schemes) weights.push_back(make_weights(s, cfg, alloc));

    const std::uint64_t bits_per_frame =
        cfg.frame_length * static_cast<std::uint64_t>(constellation.bits_per_symbol);
    const std::uint64_t total_frames = (n_bits + bits_per_frame - 1) / bits_per_frame;

    // Fixed chunk size keeps the early-stop decision, and therefore the
    // exact set of simulated frames, independent of the worker count.
    constexpr std::uint64_t kChunkFrames = 32;

    PairedBerResult result;
    result.per_scheme.resize(schemes.size());
    result.chunk_errors.resize(schemes.size());
    for (std::uint64_t chunk_start = 0; chunk_start < total_frames;
         chunk_start += kChunkFrames) {
        const std::uint64_t chunk_end = std::min(total_frames, chunk_start + kChunkFrames);

        std::vector<std::vector<std::uint64_t>> partial(
            workers, std::vector<std::uint64_t>(schemes.size(), 0));
        auto work = [&](int w) {
            for (std::uint64_t f = chunk_start + w; f < chunk_end;
                 f += static_cast<std::uint64_t>(workers)) {
                run_frame(cfg, alloc, constellation, weights,
                          math::Rng::derive(seed, 0x6672616d65, f), partial[w]);
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }

        result.chunk_bits.push_back((chunk_end - chunk_start) * bits_per_frame);
        std::uint64_t min_errors = ~0ull;
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            std::uint64_t chunk_total = 0;
            for (int w = 0; w < workers; ++w) chunk_total += partial[w][s];
            result.chunk_errors[s].push_back(chunk_total);
            result.per_scheme[s].bit_errors += chunk_total;
            result.per_scheme[s].bits += result.chunk_bits.back();
            min_errors = std::min(min_errors, result.per_scheme[s].bit_errors);
        }
        if (min_errors >= early_stop_errors) break;
    }
    return result;
}

double ber_montecarlo(const ScenarioConfig& cfg, const PowerAllocation& alloc,
                      CombinerScheme scheme, std::uint64_t n_bits, std::uint64_t seed,
                      std::uint64_t early_stop_errors, int workers) {
    if (n_bits < 10'000)
        throw std::invalid_argument("ber_montecarlo: need at least 1e4 bits");
    const CombinerScheme schemes[] = {scheme};
    return ber_montecarlo_paired(cfg, alloc, schemes, n_bits, seed, early_stop_errors,
                                 workers)
        .rate(0);
}

}  // namespace daf::phy

// phylink.hpp - the end-to-end differential amplify-and-forward chain:
// M-PSK differential encoding, two-hop signal generation over the fading
// processes, diversity combining and minimum-distance detection.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "daf/channel.hpp"
#include "daf/math.hpp"
#include "daf/scenario.hpp"

namespace daf::phy {

using Complex = std::complex<double>;
using ComplexSeries = std::vector<Complex>;

// Unit-circle M-PSK alphabet with Gray-coded bit labels.
struct ConstellationSpec {
    explicit ConstellationSpec(int M);

    int M;
    int bits_per_symbol;

    Complex symbol(int m) const { return points_[m]; }
    double dmin2() const;  // 4 sin^2(pi/M)

    static unsigned gray_encode(unsigned m) { return m ^ (m >> 1); }
    static unsigned gray_decode(unsigned g);

    /// Symbol index whose Gray label equals the given bit group.
    int index_from_bits(unsigned bits) const;

  private:
    std::vector<Complex> points_;
};

/// s[0] = 1, s[k] = v[k] * s[k-1]; inputs must be unit modulus.
ComplexSeries differential_encode(std::span<const Complex> v);

/// Fixed relay gain sqrt(Pi / (P0 + 1)).
double amplification_factor(double Pi, double P0);

struct PowerAllocation {
    double total_P = 0.0;
    double P0 = 0.0;
    std::vector<double> Pi;

    /// Half the budget to the source, the rest split across relays.
    static PowerAllocation equal_split(double total_P, int relays);
    void validate() const;
};

enum class CombinerScheme { Cdd, Tvd, Optimum };

// Branch weights for the decision statistic.  Cdd and Tvd weights are
// fixed per run; Optimum weights are re-evaluated per channel use from
// the genie relay-destination gains, so the parameters ride along.
struct CombinerWeights {
    CombinerScheme scheme = CombinerScheme::Cdd;
    double b0 = 0.5;
    std::vector<double> bi;

    double alpha0 = 1.0;
    std::vector<double> alphai;
    std::vector<double> A;
    double P0 = 0.0;
};

CombinerWeights weights_cdd(std::span<const double> A);
CombinerWeights weights_tvd(double alpha0, std::span<const double> alphai,
                            std::span<const double> A, double P0);
CombinerWeights weights_optimum(double alpha0, std::span<const double> alphai,
                                std::span<const double> A, double P0,
                                std::span<const Complex> h_rd_now);

/// Weights for a configured run (Optimum carries parameters only; its
/// per-use values come from the genie gains during combining).
CombinerWeights make_weights(CombinerScheme scheme, const ScenarioConfig& cfg,
                             const PowerAllocation& alloc);

// Received series for one frame: direct branch, per-relay branches and
// (optionally) the genie relay-destination gains behind them.
struct FrameObservation {
    ComplexSeries y0;
    std::vector<ComplexSeries> yi;
    std::vector<ComplexSeries> genie_h_rd;

    std::size_t length() const { return y0.size(); }
};

/// Decision statistic zeta at channel use k >= 1.
Complex combine(const FrameObservation& obs, const CombinerWeights& w, std::size_t k);

/// Index of the constellation point nearest to zeta; exact ties resolve
/// to the smallest index.
int detect_min_ed(Complex zeta, const ConstellationSpec& constellation);

// Streaming two-hop frame engine.  Channel gains advance per channel use
// with the scenario fade rates; relay noise is amplified and forwarded
// physically rather than drawn from its aggregate distribution.
class FrameSimulator {
  public:
    FrameSimulator(const ScenarioConfig& cfg, const PowerAllocation& alloc,
                   std::uint64_t seed);

    void step(Complex v);

    int relays() const { return static_cast<int>(A_.size()); }
    Complex y0_prev() const { return y0_prev_; }
    Complex y0_now() const { return y0_now_; }
    Complex yi_prev(int i) const { return yi_prev_[i]; }
    Complex yi_now(int i) const { return yi_now_[i]; }
    Complex h_rd_prev(int i) const { return h_rd_prev_[i]; }
    Complex h_rd_now(int i) const { return h_rd_now_[i]; }
    const std::vector<double>& amplification() const { return A_; }

  private:
    double sqrt_P0_;
    bool noise_on_;
    std::vector<double> A_;
    std::vector<channel::FadingProcess> h_sd_;  // single element
    std::vector<channel::FadingProcess> h_sr_, h_rd_;
    math::Rng noise_;
    Complex s_{1.0, 0.0};
    Complex y0_prev_{}, y0_now_{};
    std::vector<Complex> yi_prev_, yi_now_;
    std::vector<Complex> h_rd_prev_, h_rd_now_;

    void receive();
};

/// Materialized frame: differentially encodes the data symbols and runs
/// the streaming engine, recording every branch and the genie gains.
FrameObservation simulate_frame(const ScenarioConfig& cfg,
                                const PowerAllocation& alloc,
                                std::span<const unsigned> data_bits,
                                std::uint64_t seed);

struct BerCounts {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;

    double rate() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
};

inline constexpr std::uint64_t kDefaultEarlyStopErrors = 2000;

// Paired error counts with per-chunk tallies.  Slow fades hold a frame
// inside one channel level, so bit errors cluster; standard errors here
// come from the spread across independent chunks rather than from a
// binomial count.
struct PairedBerResult {
    std::vector<BerCounts> per_scheme;
    std::vector<std::uint64_t> chunk_bits;
    std::vector<std::vector<std::uint64_t>> chunk_errors;  // [scheme][chunk]

    double rate(std::size_t scheme) const { return per_scheme[scheme].rate(); }
    /// Cluster-robust standard error of rate(scheme).
    double rate_standard_error(std::size_t scheme) const;
    /// Cluster-robust standard error of rate(a) - rate(b) over the shared
    /// realizations.
    double difference_standard_error(std::size_t a, std::size_t b) const;
};

/// Frame-parallel bit error count for several schemes over shared channel
/// and noise realizations.  Deterministic for a given seed, independent of
/// the worker count; stops early once every scheme has at least
/// early_stop_errors errors.
PairedBerResult ber_montecarlo_paired(
    const ScenarioConfig& cfg, const PowerAllocation& alloc,
    std::span<const CombinerScheme> schemes, std::uint64_t n_bits,
    std::uint64_t seed, std::uint64_t early_stop_errors = kDefaultEarlyStopErrors,
    int workers = 1);

/// Bit error rate for one scheme; requires n_bits >= 10^4.
double ber_montecarlo(const ScenarioConfig& cfg, const PowerAllocation& alloc,
                      CombinerScheme scheme, std::uint64_t n_bits,
                      std::uint64_t seed,
                      std::uint64_t early_stop_errors = kDefaultEarlyStopErrors,
                      int workers = 1);

}  // namespace daf::phy

// channel.hpp - time-varying Rayleigh fading generation and validation:
// AR(1) single links, the cascaded two-hop channel in exact and reduced
// form, a sum-of-sinusoids reference generator, and sample statistics.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "daf/math.hpp"

namespace daf::channel {

using Complex = std::complex<double>;
using ComplexSeries = std::vector<Complex>;

/// Lag-n fading autocorrelation J0(2 pi f n) under isotropic scattering.
/// f is the normalized Doppler in [0, 0.5); n >= 0 is the lag in channel uses.
double jakes_autocorrelation(double f, int n);

struct FadingSpec {
    double normalized_doppler = 0.0;  // cycles per symbol, in [0, 0.5)
    int spacing_n = 1;                // channel uses are n symbols apart
    std::size_t length = 0;

    void validate() const;
    double autocorrelation() const;  // J0(2 pi f n)
};

/// One AR(1) update: alpha*h_prev + sqrt(1-alpha^2)*innovation.
Complex ar1_step(Complex h_prev, double alpha, Complex innovation);

// State of one source-relay-destination product channel.  h_prev is the
// cascaded gain at the previous use; the per-hop gains evolve as AR(1)
// processes with parameters alpha_sr and alpha_rd.
struct CascadedChannelState {
    Complex h_prev{0.0, 0.0};
    Complex h_sr_prev{0.0, 0.0};
    Complex h_rd_prev{0.0, 0.0};
    double alpha_sr = 1.0;
    double alpha_rd = 1.0;

    double alpha() const { return alpha_sr * alpha_rd; }

    /// Stationary start: per-hop gains drawn CN(0,1), product formed.
    static CascadedChannelState stationary_start(double alpha_sr, double alpha_rd,
                                                 math::Rng& rng);
};

struct CascadedSample {
    Complex h;      // cascaded gain at the new channel use
    Complex delta;  // innovation part: h = alpha*h_prev + delta
};

/// Advances both hops by one AR(1) step and returns the new product gain
/// decomposed as alpha*h_prev + delta, where delta is the exact three-term
/// innovation of the product process.
CascadedSample cascaded_step_exact(CascadedChannelState& state, Complex e_sr,
                                   Complex e_rd);

/// Reduced AR(1) recursion for the cascaded gain driven by the scaled
/// single-term innovation sqrt(1-alpha^2)*h_rd_prev*e_sr.  Does not move
/// the relay-destination gain; pair with advance_rd per channel use.
Complex cascaded_step_model(CascadedChannelState& state, Complex e_sr);

/// One AR(1) step of the relay-destination gain inside the state.
void advance_rd(CascadedChannelState& state, Complex e_rd);

/// Single-link fading generator.  Ar1 is the model every analysis result
/// is derived on; JakesSos is a sum-of-sinusoids reference used to check
/// robustness against a physically motivated spectrum.
class FadingProcess {
  public:
    enum class Kind { Ar1, JakesSos };

    FadingProcess(Kind kind, double normalized_doppler, int spacing_n,
                  std::uint64_t seed);

    /// Gain for the next channel use (first call returns the initial gain).
    Complex next();

  private:
    static constexpr int kSinusoids = 16;

    Kind kind_;
    double alpha_ = 1.0;
    double f_eff_ = 0.0;  // doppler * spacing per channel use
    math::Rng rng_;
    bool started_ = false;
    Complex h_{0.0, 0.0};
    // sum-of-sinusoids tables
    std::vector<double> cos_angle_, sin_angle_, phase_i_, phase_q_;
    std::uint64_t tick_ = 0;
};

/// Full cascaded-channel generator over one seeded stream.
class CascadedChannelSimulator {
  public:
    enum class Mode { Exact, Model };

    CascadedChannelSimulator(Mode mode, double alpha_sr, double alpha_rd,
                             std::uint64_t seed);

    CascadedSample next();
    const CascadedChannelState& state() const { return state_; }

  private:
    Mode mode_;
    CascadedChannelState state_;
    math::Rng rng_;
};

// One stationary lag-1 draw of the cascaded channel.  Slow fades keep a
// single stream correlated over thousands of uses, so ensemble statistics
// need independent draws rather than one long time average.
struct CascadedPair {
    Complex h0, h1;  // consecutive stationary gains
    Complex delta;   // innovation that carried h0 to h1
};

CascadedPair cascaded_stationary_pair(CascadedChannelSimulator::Mode mode,
                                      double alpha_sr, double alpha_rd,
                                      std::uint64_t seed);

/// Zero-mean unit-variance Rayleigh-fading sequence whose lag-m sample
/// autocorrelation approaches J0(2 pi f n m); reproducible from the seed.
ComplexSeries generate_jakes_process(const FadingSpec& spec, std::uint64_t seed);

/// (1/(L-lag)) * sum_k h[k] conj(h[k+lag]).
Complex estimate_autocorrelation(const ComplexSeries& series, std::size_t lag);

/// Density of the cascaded-channel envelope: 4*lambda*K0(2*lambda).
double envelope_pdf(double lambda);

// Uniform-bin histogram with density normalization.
struct Histogram {
    double lo = 0.0, hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    Histogram(double lo, double hi, std::size_t bins);

    void add(double x);  // samples outside [lo, hi) count toward total only
    double bin_width() const;
    double bin_center(std::size_t i) const;
    double density(std::size_t i) const;
};

void write_series_csv(const std::string& path, const ComplexSeries& series);
void write_histogram_csv(const std::string& path, const Histogram& hist);

}  // namespace daf::channel

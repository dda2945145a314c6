#include "daf/channel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace daf::channel {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double jakes_autocorrelation(double f, int n) {
    if (!(f >= 0.0) || f >= 0.5)
        throw std::invalid_argument("jakes_autocorrelation: doppler outside [0, 0.5)");
    if (n < 0) throw std::invalid_argument("jakes_autocorrelation: negative lag");
    return math::bessel_j0(kTwoPi * f * n);
}

void FadingSpec::validate() const {
    if (!(normalized_doppler >= 0.0) || normalized_doppler >= 0.5)
        throw std::invalid_argument("FadingSpec: doppler outside [0, 0.5)");
    if (spacing_n < 1) throw std::invalid_argument("FadingSpec: spacing_n < 1");
    if (length == 0) throw std::invalid_argument("FadingSpec: zero length");
}

double FadingSpec::autocorrelation() const {
    return jakes_autocorrelation(normalized_doppler, spacing_n);
}

Complex ar1_step(Complex h_prev, double alpha, Complex innovation) {
    if (std::fabs(alpha) > 1.0) throw std::invalid_argument("ar1_step: |alpha| > 1");
    return alpha * h_prev + std::sqrt(1.0 - alpha * alpha) * innovation;
}

CascadedChannelState CascadedChannelState::stationary_start(double alpha_sr,
                                                            double alpha_rd,
                                                            math::Rng& rng) {
    CascadedChannelState st;
    st.alpha_sr = alpha_sr;
    st.alpha_rd = alpha_rd;
    st.h_sr_prev = rng.next_complex_gaussian(1.0);
    st.h_rd_prev = rng.next_complex_gaussian(1.0);
    st.h_prev = st.h_sr_prev * st.h_rd_prev;
    return st;
}

CascadedSample cascaded_step_exact(CascadedChannelState& state, Complex e_sr,
                                   Complex e_rd) {
    const double asr = state.alpha_sr, ard = state.alpha_rd;
    const double qsr = std::sqrt(1.0 - asr * asr);
    const double qrd = std::sqrt(1.0 - ard * ard);

    // Innovation of the product process, decomposed term by term.
    const Complex delta = asr * qrd * state.h_sr_prev * e_rd +
                          ard * qsr * state.h_rd_prev * e_sr +
                          qsr * qrd * e_sr * e_rd;

    state.h_sr_prev = ar1_step(state.h_sr_prev, asr, e_sr);
    state.h_rd_prev = ar1_step(state.h_rd_prev, ard, e_rd);
    const Complex h = state.h_sr_prev * state.h_rd_prev;
    state.h_prev = h;
    return {h, delta};
}

Complex cascaded_step_model(CascadedChannelState& state, Complex e_sr) {
    const double alpha = state.alpha();
    const Complex h =
        alpha * state.h_prev + std::sqrt(1.0 - alpha * alpha) * state.h_rd_prev * e_sr;
    state.h_prev = h;
    return h;
}

void advance_rd(CascadedChannelState& state, Complex e_rd) {
    state.h_rd_prev = ar1_step(state.h_rd_prev, state.alpha_rd, e_rd);
}

FadingProcess::FadingProcess(Kind kind, double normalized_doppler, int spacing_n,
                             std::uint64_t seed)
    : kind_(kind), rng_(seed) {
    FadingSpec spec{normalized_doppler, spacing_n, 1};
    spec.validate();
    alpha_ = spec.autocorrelation();
    f_eff_ = normalized_doppler * spacing_n;

    if (normalized_doppler == 0.0) {
        kind_ = Kind::Ar1;  // a static draw held forever
        alpha_ = 1.0;
        return;
    }
    if (kind_ == Kind::JakesSos) {
        cos_angle_.resize(kSinusoids);
        sin_angle_.resize(kSinusoids);
        phase_i_.resize(kSinusoids);
        phase_q_.resize(kSinusoids);
        const double theta = kTwoPi * rng_.next_uniform() - kPi;
        for (int m = 0; m < kSinusoids; ++m) {
            const double arrival = (kTwoPi * (m + 1) - kPi + theta) / (4.0 * kSinusoids);
            cos_angle_[m] = std::cos(arrival);
            sin_angle_[m] = std::sin(arrival);
            phase_i_[m] = kTwoPi * rng_.next_uniform() - kPi;
            phase_q_[m] = kTwoPi * rng_.next_uniform() - kPi;
        }
    }
}

Complex FadingProcess::next() {
    if (kind_ == Kind::Ar1) {
        if (!started_) {
            started_ = true;
            h_ = rng_.next_complex_gaussian(1.0);
        } else if (alpha_ < 1.0) {
            h_ = ar1_step(h_, alpha_, rng_.next_complex_gaussian(1.0));
        }
        return h_;
    }
    const double wt = kTwoPi * f_eff_ * static_cast<double>(tick_++);
    double xi = 0.0, xq = 0.0;
    for (int m = 0; m < kSinusoids; ++m) {
        xi += std::cos(wt * cos_angle_[m] + phase_i_[m]);
        xq += std::cos(wt * sin_angle_[m] + phase_q_[m]);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(kSinusoids));
    return {xi * scale, xq * scale};
}

CascadedChannelSimulator::CascadedChannelSimulator(Mode mode, double alpha_sr,
                                                   double alpha_rd, std::uint64_t seed)
    : mode_(mode), rng_(seed) {
    state_ = CascadedChannelState::stationary_start(alpha_sr, alpha_rd, rng_);
}

CascadedSample CascadedChannelSimulator::next() {
    const Complex e_sr = rng_.next_complex_gaussian(1.0);
    const Complex e_rd = rng_.next_complex_gaussian(1.0);
    if (mode_ == Mode::Exact) return cascaded_step_exact(state_, e_sr, e_rd);

    const double alpha = state_.alpha();
    const Complex delta = std::sqrt(1.0 - alpha * alpha) * state_.h_rd_prev * e_sr;
    const Complex h = cascaded_step_model(state_, e_sr);
    advance_rd(state_, e_rd);
    return {h, delta};
}

CascadedPair cascaded_stationary_pair(CascadedChannelSimulator::Mode mode,
                                      double alpha_sr, double alpha_rd,
                                      std::uint64_t seed) {
    CascadedChannelSimulator sim(mode, alpha_sr, alpha_rd, seed);
    const Complex h0 = sim.state().h_prev;
    const auto s = sim.next();
    return {h0, s.h, s.delta};
}

ComplexSeries generate_jakes_process(const FadingSpec& spec, std::uint64_t seed) {
    spec.validate();
    FadingProcess gen(FadingProcess::Kind::JakesSos, spec.normalized_doppler,
                      spec.spacing_n, seed);
    ComplexSeries out(spec.length);
    for (auto& h : out) h = gen.next();
    return out;
}

Complex estimate_autocorrelation(const ComplexSeries& series, std::size_t lag) {
    if (series.empty()) throw std::invalid_argument("estimate_autocorrelation: empty");
    if (lag >= series.size())
        throw std::invalid_argument("estimate_autocorrelation: lag >= length");
    Complex acc{0.0, 0.0};
    const std::size_t n = series.size() - lag;
    for (std::size_t k = 0; k < n; ++k) acc += series[k] * std::conj(series[k + lag]);
    return acc / static_cast<double>(n);
}

double envelope_pdf(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("envelope_pdf: negative argument");
    if (lambda == 0.0) return 0.0;
    return 4.0 * lambda * math::bessel_k0(2.0 * lambda);
}

Histogram::Histogram(double lo_, double hi_, std::size_t bins)
    : lo(lo_), hi(hi_), counts(bins, 0) {
    if (!(hi > lo) || bins == 0)
        throw std::invalid_argument("Histogram: bad range or bin count");
}

void Histogram::add(double x) {
    ++total;
    if (x < lo || x >= hi) return;
    const auto i = static_cast<std::size_t>((x - lo) / (hi - lo) *
                                            static_cast<double>(counts.size()));
    ++counts[i < counts.size() ? i : counts.size() - 1];
}

double Histogram::bin_width() const {
    return (hi - lo) / static_cast<double>(counts.size());
}

double Histogram::bin_center(std::size_t i) const {
    return lo + (static_cast<double>(i) + 0.5) * bin_width();
}

double Histogram::density(std::size_t i) const {
    if (total == 0) return 0.0;
    return static_cast<double>(counts[i]) / (static_cast<double>(total) * bin_width());
}

namespace {
FILE* open_or_throw(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}
}  // namespace

void write_series_csv(const std::string& path, const ComplexSeries& series) {
    FILE* f = open_or_throw(path);
    std::fputs("index,real,imag\n", f);
    for (std::size_t k = 0; k < series.size(); ++k)
        std::fprintf(f, "%zu,%.9g,%.9g\n", k, series[k].real(), series[k].imag());
    std::fclose(f);
}

void write_histogram_csv(const std::string& path, const Histogram& hist) {
    FILE* f = open_or_throw(path);
    std::fputs("bin_center,density\n", f);
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        std::fprintf(f, "%.9g,%.9g\n", hist.bin_center(i), hist.density(i));
    std::fclose(f);
}

}  // namespace daf::channel

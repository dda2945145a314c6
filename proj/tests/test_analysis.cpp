#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <stdexcept>
#include <vector>

#include "daf/analysis.hpp"
#include "daf/channel.hpp"
#include "daf/math.hpp"

using namespace daf;
using namespace daf::analysis;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <typename F>
double adaptive_simpson_rec(F f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
double adaptive_simpson(F f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Scenario fade-rate rows (f_sd, f_sr, f_rd).
struct Row {
    const char* name;
    double f_sd, f_sr, f_rd;
};
constexpr Row kRows[] = {
    {"scenario_I", 0.005, 0.005, 0.005},
    {"scenario_II", 0.05, 0.05, 0.005},
    {"scenario_III", 0.1, 0.1, 0.05}};

PepInputs inputs_for(const Row& row, int relays, int M, double P_dB,
                     int nodes = 64) {
    PepInputs in;
    const double P = std::pow(10.0, P_dB / 10.0);
    in.P0 = P / 2.0;
    const double Pi = P / (2.0 * relays);
    in.alpha0 = channel::jakes_autocorrelation(row.f_sd, 1);
    const double ai = channel::jakes_autocorrelation(row.f_sr, 1) *
                      channel::jakes_autocorrelation(row.f_rd, 1);
    in.alphai.assign(relays, ai);
    in.A.assign(relays, std::sqrt(Pi / (in.P0 + 1.0)));
    in.dmin2 = M == 2 ? 4.0 : 4.0 * std::pow(std::sin(kPi / M), 2);
    in.quadrature_nodes = nodes;
    return in;
}

// eta-integral of the relay MGF factor.  gamma uses the full form when
// with_low_snr_term is set, otherwise the single-pole reduction that the
// closed expression integrates exactly.
double relay_factor_by_integration(double theta, double alpha, double A, double P0,
                                   double d2, bool with_low_snr_term) {
    const double A2 = A * A;
    const double a2 = alpha * alpha;
    const double s2 = std::sin(theta) * std::sin(theta);
    auto f = [&](double eta) {
        if (eta <= 0.0) return 1.0;
        const double rho = A2 * P0 * eta / (A2 * eta + 1.0);
        double den = 2.0 * rho * (1.0 - a2) + 4.0;
        if (with_low_snr_term) den += 2.0 / rho;
        const double g = a2 * rho / den;
        return std::exp(-eta) / (1.0 + g * d2 / (2.0 * s2));
    };
    return adaptive_simpson(f, 0.0, 2.0, 1e-13) + adaptive_simpson(f, 2.0, 50.0, 1e-13);
}

double single_branch_pep(double g, double d2) {
    return 0.5 * (1.0 - std::sqrt(g * d2 / (2.0 + g * d2)));
}

}  // namespace

TEST_CASE("gamma0 and gamma_i") {
    CHECK(gamma0(1.0, 50.0) == doctest::Approx(50.0 * 50.0 / (4.0 * 50.0 + 2.0)));
    CHECK(gamma0(0.0, 17.0) == 0.0);
    CHECK(gamma0(0.9, 1e9) == doctest::Approx(0.81 / (2.0 * 0.19)).epsilon(1e-6));
    CHECK(gamma_i(1.0, 50.0) == doctest::Approx(50.0 * 50.0 / (4.0 * 50.0 + 2.0)));
    CHECK(gamma_i(0.0, 3.0) == 0.0);
    CHECK(gamma_i(0.9, 1e9) == doctest::Approx(2.13158).epsilon(1e-5));
}

TEST_CASE("gamma_bar") {
    CHECK(gamma_bar(0.0) == 0.0);
    CHECK(gamma_bar(0.9) == doctest::Approx(2.13158).epsilon(1e-5));
    CHECK(std::isinf(gamma_bar(1.0)));
    CHECK_THROWS_AS(gamma_bar(1.5), std::invalid_argument);
    CHECK_THROWS_AS(gamma_bar(-0.1), std::invalid_argument);

    const double alphas[] = {0.95, 1.0};
    const auto set = GammaBarSet::from_alphas(0.5, alphas);
    CHECK_FALSE(set.all_finite());
}

TEST_CASE("pep_conditional: closed form at R = 0 and the all-zero limit") {
    PepInputs in;
    in.alpha0 = 0.97;
    in.P0 = 25.0;
    in.dmin2 = 4.0;
    const double g0 = gamma0(in.alpha0, in.P0);
    CHECK(pep_conditional(in, {}) ==
          doctest::Approx(single_branch_pep(g0, in.dmin2)).epsilon(1e-10));

    in.alpha0 = 0.0;  // gamma0 = 0, integrand is identically one
    CHECK(pep_conditional(in, {}) == doctest::Approx(0.5).epsilon(1e-12));

    in.alphai = {0.9};
    CHECK_THROWS_AS(pep_conditional(in, {}), std::invalid_argument);
}

TEST_CASE("relay_mgf_average equals the eta integral of its kernel") {
    for (double theta : {0.3, 0.9, kPi / 2}) {
        for (double P0 : {5.0, 50.0, 5000.0}) {
            for (double alpha : {0.88155, 0.9752369, 1.0}) {
                const double A = std::sqrt((P0 / 2.0) / (P0 + 1.0));
                const double closed = relay_mgf_average(theta, alpha, A, P0, 4.0);
                const double oracle =
                    relay_factor_by_integration(theta, alpha, A, P0, 4.0, false);
                CHECK(closed == doctest::Approx(oracle).epsilon(1e-9));
            }
        }
    }
    // Silent relay contributes a unit factor.
    CHECK(relay_mgf_average(1.0, 0.95, 0.0, 100.0, 4.0) == 1.0);
    // At alpha = 0 the kernel is 1 and the closed form collapses too.
    CHECK(relay_mgf_average(1.0, 0.0, 0.7, 100.0, 4.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relay_mgf_average sits below the full-kernel average at finite power") {
    // The closed expression integrates the kernel without the low-SNR
    // 2/rho term; the gap shrinks as P0 grows and vanishes in the limit.
    const double alpha = 0.9752369;
    double prev_gap = 1.0;
    for (double P0 : {50.0, 500.0, 5000.0}) {
        const double A = std::sqrt((P0 / 2.0) / (P0 + 1.0));
        const double closed = relay_mgf_average(kPi / 2, alpha, A, P0, 4.0);
        const double full =
            relay_factor_by_integration(kPi / 2, alpha, A, P0, 4.0, true);
        CHECK(closed < full);
        const double gap = (full - closed) / full;
        CHECK(gap < prev_gap);
        CHECK(gap < 0.06);
        prev_gap = gap;
    }
}

TEST_CASE("pep_unconditional: degenerate cases and averaging oracle") {
    // R = 0 reduces to the conditional expression.
    PepInputs r0;
    r0.alpha0 = 0.99;
    r0.P0 = 100.0;
    CHECK(pep_unconditional(r0) == doctest::Approx(pep_conditional(r0, {})));

    // Averaging the conditional PEP over the exponential |h_rd|^2 with the
    // kernel the closed form integrates reproduces pep_unconditional.
    const auto in = inputs_for(kRows[1], 2, 2, 20.0);
    const double g0 = gamma0(in.alpha0, in.P0);
    const auto rule = math::gauss_legendre_rule(64);
    math::Rng rng(404);
    const int n = 100'000;
    double sum_tilde = 0.0, sq_tilde = 0.0, sum_full = 0.0;
    for (int t = 0; t < n; ++t) {
        double gi[2];
        for (int i = 0; i < 2; ++i) {
            const double eta = std::norm(rng.next_complex_gaussian(1.0));
            const double A2 = in.A[i] * in.A[i];
            const double rho = A2 * in.P0 * eta / (A2 * eta + 1.0);
            const double a2 = in.alphai[i] * in.alphai[i];
            gi[i] = rho > 0.0 ? in.alphai[i] * in.alphai[i] * rho /
                                    (2.0 * rho * (1.0 - a2) + 4.0)
                              : 0.0;
        }
        const double tilde = rule.integrate([&](double theta) {
            const double two_s2 = 2.0 * std::pow(std::sin(theta), 2);
            return 1.0 / ((1.0 + g0 * in.dmin2 / two_s2) *
                          (1.0 + gi[0] * in.dmin2 / two_s2) *
                          (1.0 + gi[1] * in.dmin2 / two_s2));
        }) / kPi;
        sum_tilde += tilde;
        sq_tilde += tilde * tilde;
    }
    const double mean_tilde = sum_tilde / n;
    const double se =
        std::sqrt((sq_tilde / n - mean_tilde * mean_tilde) / static_cast<double>(n));
    const double closed = pep_unconditional(in);
    CHECK(std::fabs(mean_tilde - closed) < 3.0 * se);
}

TEST_CASE("pep_unconditional vs the spec-form conditional average") {
    // With the full gamma_i kernel the Monte Carlo average sits above the
    // closed expression by the finite-power gap of the relay factor.
    const auto in = inputs_for(kRows[1], 2, 2, 20.0);
    math::Rng rng(505);
    const int n = 20'000;
    double sum = 0.0;
    for (int t = 0; t < n; ++t) {
        std::vector<Complex> h_rd(2);
        for (auto& h : h_rd) h = rng.next_complex_gaussian(1.0);
        sum += pep_conditional(in, h_rd);
    }
    const double mean_full = sum / n;
    const double closed = pep_unconditional(in);
    CHECK(mean_full > closed);
    CHECK((mean_full - closed) / mean_full < 0.25);
}

TEST_CASE("ber_from_pep") {
    CHECK(ber_from_pep(0.01, 2) == 0.01);
    CHECK(ber_from_pep(0.01, 4) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(ber_from_pep(0.03, 8) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK_THROWS_AS(ber_from_pep(0.01, 1), std::invalid_argument);
}

TEST_CASE("pep_upper_bound: closed value and dominance") {
    // gamma0 * dmin2 = 2 at alpha0 = 1, P0 = 1 + sqrt(2), M = 2.
    PepInputs in;
    in.alpha0 = 1.0;
    in.P0 = 1.0 + std::sqrt(2.0);
    CHECK(pep_upper_bound(in) == doctest::Approx(0.25).epsilon(1e-12));

    for (const auto& row : kRows) {
        for (double P_dB : {10.0, 20.0, 30.0, 40.0}) {
            const auto inputs = inputs_for(row, 2, 2, P_dB);
            const double pep = pep_unconditional(inputs);
            const double bound = pep_upper_bound(inputs);
            CHECK(pep > 0.0);
            CHECK(pep <= bound);
            CHECK(bound <= 0.5);
        }
    }
}

TEST_CASE("slow-fading scaling of the bound factors") {
    // gamma0 grows linearly in P0 once 4 + 2/P0 is negligible.
    const double s_g0 = std::log(gamma0(1.0, 1e5) / gamma0(1.0, 1e3)) / std::log(1e2);
    CHECK(std::fabs(s_g0 - 1.0) < 0.05);

    // The relay factor at theta = pi/2 carries a slowly varying log
    // factor on top of 1/P0, worth about 12% of slope at 30-50 dB; it
    // thins out by 80-100 dB.
    auto slope_between = [](double PdB_lo, double PdB_hi) {
        auto value = [](double PdB) {
            const double P0 = std::pow(10.0, PdB / 10.0) / 2.0;
            const double A = std::sqrt((P0 / 2.0) / (P0 + 1.0));
            return relay_mgf_average(kPi / 2, 1.0, A, P0, 4.0);
        };
        return std::log(value(PdB_hi) / value(PdB_lo)) /
               std::log(std::pow(10.0, PdB_hi / 10.0) / std::pow(10.0, PdB_lo / 10.0));
    };
    const double s_30_50 = slope_between(30.0, 50.0);
    CHECK(s_30_50 < -0.82);
    CHECK(s_30_50 > -1.0);
    const double s_far = slope_between(120.0, 160.0);
    CHECK(std::fabs(s_far + 1.0) < 0.05);
}

TEST_CASE("error_floor: single branch and infinite flags") {
    GammaBarSet set;
    set.gbar0 = 9.821324;
    const auto f = error_floor(set, 4.0);
    CHECK(f.exists);
    CHECK(f.value == doctest::Approx(single_branch_pep(set.gbar0, 4.0)).epsilon(1e-12));

    set.gbari = {gamma_bar(1.0)};
    const auto none = error_floor(set, 4.0);
    CHECK_FALSE(none.exists);
    CHECK(none.value == 0.0);
}

TEST_CASE("error_floor: three closed forms against the quadrature route") {
    // Mixed case at the Table-I fade rates.
    for (const auto& row : kRows) {
        for (int R : {2, 3}) {
            for (double d2 : {4.0, 2.0}) {
                const double a0 = channel::jakes_autocorrelation(row.f_sd, 1);
                const double ai = channel::jakes_autocorrelation(row.f_sr, 1) *
                                  channel::jakes_autocorrelation(row.f_rd, 1);
                std::vector<double> alphai(R, ai);
                const auto set = GammaBarSet::from_alphas(a0, alphai);
                const auto f = error_floor(set, d2);
                REQUIRE(f.exists);
                const double ref = floor_from_quadrature(set, d2, 256);
                CHECK(f.value == doctest::Approx(ref).epsilon(1e-8));
            }
        }
    }

    // All-equal case.
    GammaBarSet eq;
    eq.gbar0 = 3.7;
    eq.gbari = {3.7, 3.7, 3.7};
    CHECK(error_floor(eq, 4.0).value ==
          doctest::Approx(floor_from_quadrature(eq, 4.0, 256)).epsilon(1e-10));

    // All-distinct case.
    GammaBarSet distinct;
    distinct.gbar0 = 2.0;
    distinct.gbari = {5.0, 9.0};
    CHECK(error_floor(distinct, 4.0).value ==
          doctest::Approx(floor_from_quadrature(distinct, 4.0, 256)).epsilon(1e-10));

    // Irregular pattern (two relays equal, one distinct, none matching
    // the direct branch) falls back to the quadrature route.
    GammaBarSet odd;
    odd.gbar0 = 2.0;
    odd.gbari = {5.0, 5.0, 9.0};
    CHECK(error_floor(odd, 4.0).value ==
          doctest::Approx(floor_from_quadrature(odd, 4.0, 256)).epsilon(1e-10));
}

TEST_CASE("error_floor: degenerate limits agree across forms") {
    const double g = 9.821324;
    const double d2 = 4.0;
    GammaBarSet eq;
    eq.gbar0 = g;
    eq.gbari = {g, g};
    const double equal_value = error_floor(eq, d2).value;

    // Distinct-case formula approaching the equal case: Richardson
    // extrapolation in delta removes the linear error term.
    auto distinct_at = [&](double delta) {
        GammaBarSet set;
        set.gbar0 = g;
        set.gbari = {g * (1.0 + delta), g * (1.0 + 2.0 * delta)};
        return error_floor(set, d2).value;
    };
    const double f3 = distinct_at(1e-3);
    const double f4 = distinct_at(1e-4);
    // (10*f4 - f3)/9 cancels the O(delta) term.
    const double richardson = (10.0 * f4 - f3) / 9.0;
    CHECK(std::fabs(richardson - equal_value) / equal_value < 1e-6);

    // Gaps below the cancellation guard pool into the equal form.
    GammaBarSet tiny;
    tiny.gbar0 = g;
    tiny.gbari = {g * (1.0 + 1e-8), g * (1.0 + 2e-8)};
    CHECK(error_floor(tiny, d2).value ==
          doctest::Approx(equal_value).epsilon(1e-6));

    // Mixed form approaching the equal case.
    auto mixed_at = [&](double delta) {
        GammaBarSet set;
        set.gbar0 = g * (1.0 + delta);
        set.gbari = {g, g};
        return error_floor(set, d2).value;
    };
    const double m3 = mixed_at(1e-3);
    const double m4 = mixed_at(1e-4);
    CHECK(std::fabs((10.0 * m4 - m3) / 9.0 - equal_value) / equal_value < 1e-6);
}

TEST_CASE("pep_unconditional is non-increasing in power and reaches the floor") {
    for (const auto& row : kRows) {
        const auto gbars = GammaBarSet::from_alphas(
            channel::jakes_autocorrelation(row.f_sd, 1),
            std::vector<double>(2, channel::jakes_autocorrelation(row.f_sr, 1) *
                                       channel::jakes_autocorrelation(row.f_rd, 1)));
        double prev = 1.0;
        for (double P_dB = 0.0; P_dB <= 60.0; P_dB += 5.0) {
            const double pep = pep_unconditional(inputs_for(row, 2, 2, P_dB));
            CHECK(pep <= prev * (1.0 + 1e-12));
            prev = pep;
        }
        // High-power limit against the analytical floor; the fast rows
        // close the gap below 1e-3 at P0 = 1e8, the near-static row needs
        // more headroom because its gamma-bar values sit near 2000.
        const auto in = inputs_for(row, 2, 2, 10.0 * std::log10(2.0 * 1e8));
        const double pep_hi = pep_unconditional(in);
        const double floor = error_floor(gbars, 4.0).value;
        const double tol = std::string(row.name) == "scenario_I" ? 5e-3 : 1e-3;
        CHECK(std::fabs(pep_hi - floor) / floor < tol);
    }
}

TEST_CASE("quadrature stability of the pairwise error integral") {
    // Scenario-II kernel at P0 = 10 with two relays against an adaptive
    // oracle, plus node-doubling stability across operating points.
    PepInputs in = inputs_for(kRows[1], 2, 2, 10.0 * std::log10(20.0));
    REQUIRE(in.P0 == doctest::Approx(10.0));
    const double g0 = gamma0(in.alpha0, in.P0);
    auto integrand = [&](double theta) {
        if (theta <= 0.0) return 0.0;
        const double two_s2 = 2.0 * std::pow(std::sin(theta), 2);
        double f = 1.0 / (1.0 + g0 * in.dmin2 / two_s2);
        for (int i = 0; i < 2; ++i)
            f *= relay_mgf_average(theta, in.alphai[i], in.A[i], in.P0, in.dmin2);
        return f;
    };
    const double oracle =
        adaptive_simpson(integrand, 0.0, kPi / 2.0, 1e-13) / kPi;
    CHECK(pep_unconditional(in) == doctest::Approx(oracle).epsilon(1e-10));

    for (const auto& row : kRows) {
        for (double P_dB : {10.0, 25.0, 40.0}) {
            auto a = inputs_for(row, 2, 2, P_dB, 64);
            auto b = inputs_for(row, 2, 2, P_dB, 128);
            const double pa = pep_unconditional(a);
            const double pb = pep_unconditional(b);
            CHECK(std::fabs(pa - pb) / pb < 1e-9);
        }
    }
}

TEST_CASE("conditional moments of the decision variable") {
    // Standard Gaussian conditional mean: regressing the source-side
    // noise on the received sample gives 1/(P0+1).
    const double P0 = 50.0;
    math::Rng reg(808);
    Complex num{0.0, 0.0};
    double den = 0.0;
    for (int t = 0; t < 1'000'000; ++t) {
        const Complex h = reg.next_complex_gaussian(1.0);
        const Complex w = reg.next_complex_gaussian(1.0);
        const Complex y = std::sqrt(P0) * h + w;
        num += w * std::conj(y);
        den += std::norm(y);
    }
    const Complex slope = num / den;
    CHECK(std::fabs(slope.real() - 1.0 / (P0 + 1.0)) < 3e-4);
    CHECK(std::fabs(slope.imag()) < 3e-4);

    // Scenario II, R = 1, P = 20 dB: the mean and variance of z match the
    // closed expressions within Monte Carlo resolution.
    const double alpha0 = channel::jakes_autocorrelation(0.05, 1);
    const double alpha1 = alpha0 * channel::jakes_autocorrelation(0.005, 1);
    const double A2 = 50.0 / 51.0, A = std::sqrt(A2);
    const double d = 2.0, d2 = 4.0;  // DBPSK nearest neighbour

    math::Rng rng(909);
    const Complex h_rd = rng.next_complex_gaussian(1.0);
    const double eta = std::norm(h_rd);
    const double sigma2 = A2 * eta + 1.0;
    const double rho = A2 * P0 * eta / sigma2;
    const Complex y0 = rng.next_complex_gaussian(P0 + 1.0);
    const Complex y1 = rng.next_complex_gaussian(sigma2 * (rho + 1.0));

    const double b0 = alpha0 / (1.0 + alpha0 * alpha0 + (1.0 - alpha0 * alpha0) * P0);
    const double b1 = alpha1 / (sigma2 * (1.0 + alpha1 * alpha1 +
                                          (1.0 - alpha1 * alpha1) * rho));

    const double mu_expected =
        d2 * (alpha0 * b0 / (P0 + 1.0) * std::norm(y0) +
              alpha1 * b1 / (rho + 1.0) * std::norm(y1));
    const double var_expected =
        2.0 * d2 * (alpha0 * b0 * std::norm(y0) + alpha1 * b1 * std::norm(y1));

    const int n = 100'000;
    double zsum = 0.0, zsq = 0.0;
    for (int t = 0; t < n; ++t) {
        const Complex w0_prev =
            y0 / (P0 + 1.0) + rng.next_complex_gaussian(P0 / (P0 + 1.0));
        const Complex n0 = rng.next_complex_gaussian(1.0) - alpha0 * w0_prev +
                           std::sqrt((1.0 - alpha0 * alpha0) * P0) *
                               rng.next_complex_gaussian(1.0);
        const Complex w1_prev = y1 / (rho + 1.0) +
                                rng.next_complex_gaussian(sigma2 * rho / (rho + 1.0));
        const Complex n1 = rng.next_complex_gaussian(sigma2) - alpha1 * w1_prev +
                           std::sqrt(1.0 - alpha1 * alpha1) * A * std::sqrt(P0) *
                               h_rd * rng.next_complex_gaussian(1.0);
        const double z =
            -2.0 * (d * (b0 * std::conj(y0) * n0 + b1 * std::conj(y1) * n1)).real();
        zsum += z;
        zsq += z * z;
    }
    const double mean = zsum / n;
    const double var = zsq / n - mean * mean;
    const double se_mean = std::sqrt(var / n);
    const double se_var = var * std::sqrt(2.0 / n);
    CHECK(std::fabs(mean - mu_expected) < 3.0 * se_mean);
    CHECK(std::fabs(var - var_expected) < 3.0 * se_var);
}

TEST_CASE("conditional error event probability matches pep_conditional") {
    // Scenario II, R = 1, P = 20 dB, fixed relay-destination gains; the
    // detection-error event z > a simulated at the signal level.
    const double P0 = 50.0;
    const double alpha0 = channel::jakes_autocorrelation(0.05, 1);
    const double alpha1 = alpha0 * channel::jakes_autocorrelation(0.005, 1);
    const double A2 = 50.0 / 51.0, A = std::sqrt(A2);

    PepInputs in;
    in.alpha0 = alpha0;
    in.alphai = {alpha1};
    in.A = {A};
    in.P0 = P0;
    in.dmin2 = 4.0;

    math::Rng rng(111);
    const Complex h_rd = rng.next_complex_gaussian(1.0);
    const double eta = std::norm(h_rd);
    const double sigma2 = A2 * eta + 1.0;
    const double rho = A2 * P0 * eta / sigma2;
    const double expected = pep_conditional(in, std::vector<Complex>{h_rd});

    const double d = 2.0, d2 = 4.0;
    const double b0 = alpha0 / (1.0 + alpha0 * alpha0 + (1.0 - alpha0 * alpha0) * P0);
    const double b1 = alpha1 / (sigma2 * (1.0 + alpha1 * alpha1 +
                                          (1.0 - alpha1 * alpha1) * rho));

    const int n = 2'000'000;
    int hits = 0;
    for (int t = 0; t < n; ++t) {
        const Complex y0 = rng.next_complex_gaussian(P0 + 1.0);
        const Complex y1 = rng.next_complex_gaussian(sigma2 * (rho + 1.0));
        const Complex w0_prev =
            y0 / (P0 + 1.0) + rng.next_complex_gaussian(P0 / (P0 + 1.0));
        const Complex n0 = rng.next_complex_gaussian(1.0) - alpha0 * w0_prev +
                           std::sqrt((1.0 - alpha0 * alpha0) * P0) *
                               rng.next_complex_gaussian(1.0);
        const Complex w1_prev = y1 / (rho + 1.0) +
                                rng.next_complex_gaussian(sigma2 * rho / (rho + 1.0));
        const Complex n1 = rng.next_complex_gaussian(sigma2) - alpha1 * w1_prev +
                           std::sqrt(1.0 - alpha1 * alpha1) * A * std::sqrt(P0) *
                               h_rd * rng.next_complex_gaussian(1.0);
        const double z =
            -2.0 * (d * (b0 * std::conj(y0) * n0 + b1 * std::conj(y1) * n1)).real();
        const double a = d2 * (alpha0 * b0 * std::norm(y0) +
                               alpha1 * b1 * std::norm(y1));
        hits += z > a;
    }
    const double p = static_cast<double>(hits) / n;
    const double se = std::sqrt(expected * (1.0 - expected) / n);
    CHECK(std::fabs(p - expected) < 3.0 * se);
}

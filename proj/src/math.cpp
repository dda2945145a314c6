#include "daf/math.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace daf::math {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending power series, summed in extended precision.  The alternating
// terms peak near k ~ x/2, which costs ~4 digits of cancellation at x = 20;
// the 64-bit long double mantissa keeps the absolute error under 1e-12.
double j0_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 400; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-22) break;
    }
    return static_cast<double>(sum);
}

// Hankel asymptotic expansion, truncated at the smallest term.  For
// x >= 20 the smallest term is below 1e-16, far inside the tolerance.
double j0_asymptotic(double x) {
    long double p = 1.0L, q = 0.0L;
    long double term = 1.0L;  // ((2k-1)!!)^2 / (k! 8^k x^k)
    long double prev = std::numeric_limits<long double>::max();
    for (int k = 1; k < 40; ++k) {
        const long double m = 2.0L * k - 1.0L;
        term *= m * m / (8.0L * k * static_cast<long double>(x));
        if (term > prev) break;  // asymptotic tail started to diverge
        prev = term;
        if (k % 2 == 0)
            p += ((k / 2) % 2 == 0 ? term : -term);
        else
            q += (((k - 1) / 2) % 2 == 0 ? -term : term);
        if (term < 1e-20L) break;
    }
    const long double omega =
        static_cast<long double>(x) - 0.78539816339744830961L;  // x - pi/4
    const long double amp = std::sqrt(2.0L / (kPi * static_cast<long double>(x)));
    return static_cast<double>(amp * (p * std::cos(omega) - q * std::sin(omega)));
}

// K0 ascending series for x <= 2; all terms positive after the log split.
double k0_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double i0 = 1.0L, term = 1.0L;
    long double sum = 0.0L, hk = 0.0L;
    for (int k = 1; k < 60; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        hk += 1.0L / k;
        i0 += term;
        sum += term * hk;
        if (term * hk < 1e-24L * sum && k > 4) break;
    }
    const long double lead = -(std::log(static_cast<long double>(x) / 2.0L) +
                               static_cast<long double>(kEulerGamma));
    return static_cast<double>(lead * i0 + sum);
}

// Thompson-Barnett continued fraction (CF2) for K_nu with nu = 0, valid
// for x >= 2; converges to machine precision in a few dozen iterations.
double k0_continued_fraction(double x) {
    constexpr double eps = 1e-16;
    constexpr int max_iter = 200;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= max_iter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < eps) {
            return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
        }
    }
    throw std::runtime_error("bessel_k0: continued fraction failed to converge");
}

// E1 ascending series for x <= 1.
double e1_series(double x) {
    long double sum = 0.0L, term = 1.0L;
    for (int k = 1; k < 60; ++k) {
        term *= -static_cast<long double>(x) / k;
        sum += term / k;
        if (std::fabs(static_cast<double>(term)) < 1e-22) break;
    }
    return static_cast<double>(-static_cast<long double>(kEulerGamma) -
                               std::log(static_cast<long double>(x)) - sum);
}

// Modified-Lentz continued fraction for x > 1; returns exp(x)*E1(x).
double e1_continued_fraction_scaled(double x) {
    constexpr double fpmin = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 200;
    double b = x + 1.0;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("expint_e1: continued fraction failed to converge");
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

double bessel_j0(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_j0: non-finite argument");
    x = std::fabs(x);
    return x < 20.0 ? j0_series(x) : j0_asymptotic(x);
}

double bessel_i0(double x) {
    x = std::fabs(x);
    if (x < 18.0) {
        const long double q = static_cast<long double>(x) * x / 4.0L;
        long double term = 1.0L, sum = 1.0L;
        for (int k = 1; k < 120; ++k) {
            term *= q / (static_cast<long double>(k) * k);
            sum += term;
            if (term < 1e-20L * sum) break;
        }
        return static_cast<double>(sum);
    }
    // Asymptotic expansion; adequate for the ranges exercised here.
    long double sum = 1.0L, term = 1.0L;
    const long double ix = 1.0L / (8.0L * static_cast<long double>(x));
    for (int k = 1; k < 30; ++k) {
        const long double m = 2.0L * k - 1.0L;
        const long double next = term * m * m * ix / k;
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-18L * sum) break;
    }
    return static_cast<double>(std::exp(static_cast<long double>(x)) * sum /
                               std::sqrt(2.0L * kPi * static_cast<long double>(x)));
}

double bessel_k0(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k0: argument must be > 0");
    return x <= 2.0 ? k0_series(x) : k0_continued_fraction(x);
}

double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1: argument must be > 0");
    return x <= 1.0 ? e1_series(x) : e1_continued_fraction_scaled(x) * std::exp(-x);
}

double expx_expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expx_expint_e1: argument must be > 0");
    return x <= 1.0 ? std::exp(x) * e1_series(x) : e1_continued_fraction_scaled(x);
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
    double acc = 0.0;
    for (int i = 0; i < node_count; ++i) acc += weights[i] * f(nodes[i]);
    return acc;
}

QuadratureRule gauss_legendre_rule(int node_count) {
    if (node_count < 2)
        throw std::invalid_argument("gauss_legendre_rule: need at least 2 nodes");

    const int n = node_count;
    QuadratureRule rule;
    rule.node_count = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // Newton iteration on the Legendre recurrence, one root per half rule.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double z = std::cos(kPi * (i + 0.75L) / (n + 0.5L));
        long double pp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p1 = 1.0L, p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j + 1.0L) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0L);
            const long double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(static_cast<double>(z - z1)) < 1e-17) break;
        }
        // Map (-1, 1) -> (0, pi/2).
        const long double half = kPi / 4.0L;
        const long double w = 2.0L / ((1.0L - z * z) * pp * pp) * half;
        rule.nodes[i] = static_cast<double>(half * (1.0L - z));
        rule.nodes[n - 1 - i] = static_cast<double>(half * (1.0L + z));
        rule.weights[i] = static_cast<double>(w);
        rule.weights[n - 1 - i] = static_cast<double>(w);
    }
    return rule;
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix_finalize(state_);
}

double Rng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * kPi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

std::complex<double> Rng::next_complex_gaussian(double variance) {
    if (variance < 0.0)
        throw std::invalid_argument("next_complex_gaussian: negative variance");
    if (variance == 0.0) return {0.0, 0.0};
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-variance * std::log(u1));
    const double phi = 2.0 * kPi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

Rng Rng::split() { return Rng(splitmix_finalize(next_u64() ^ 0xA3EC647659359ACDULL)); }

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    std::uint64_t s = splitmix_finalize(seed + 0x9E3779B97F4A7C15ULL);
    s = splitmix_finalize(s ^ (a + 0xD1B54A32D192ED03ULL));
    s = splitmix_finalize(s ^ (b + 0x8CB92BA72F3D8DD7ULL));
    s = splitmix_finalize(s ^ (c + 0xEB44ACCAB455D165ULL));
    return s;
}

std::complex<double> sample_complex_gaussian(Rng& rng, double variance) {
    return rng.next_complex_gaussian(variance);
}

}  // namespace daf::math

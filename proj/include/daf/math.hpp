// math.hpp - special functions, Gauss-Legendre quadrature and seedable
// random streams used by the channel, link and analysis layers.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace daf::math {

/// Bessel function J0(x) of the first kind, order zero.
/// Absolute error below 1e-12 for |x| <= 50.
double bessel_j0(double x);

/// Modified Bessel function K0(x) of the second kind, order zero.
/// Relative error below 1e-10 on (1e-8, 50).  Requires x > 0.
double bessel_k0(double x);

/// Modified Bessel function I0(x) of the first kind, order zero.
double bessel_i0(double x);

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt.  Requires x > 0.
double expint_e1(double x);

/// exp(x) * E1(x) evaluated as one fused expression so it stays finite
/// where exp(x) alone would overflow or E1(x) alone would underflow.
double expx_expint_e1(double x);

// Fixed-order quadrature rule on the open interval (0, pi/2).
struct QuadratureRule {
    int node_count = 0;
    std::vector<double> nodes;    // strictly increasing, inside (0, pi/2)
    std::vector<double> weights;  // positive, summing to pi/2

    double integrate(const std::function<double(double)>& f) const;
};

/// Gauss-Legendre rule mapped onto (0, pi/2); exact for polynomials of
/// degree 2*node_count-1 after the affine transform.  node_count >= 2.
QuadratureRule gauss_legendre_rule(int node_count);

/// Splittable 64-bit random stream.  Streams derived from distinct
/// (seed, index...) tuples are independent for Monte Carlo purposes, so
/// work can be partitioned deterministically across workers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double next_uniform();

    /// Standard normal deviate (Box-Muller; pairs are cached).
    double next_gaussian();

    /// Complex circular Gaussian with the given total variance.  Consumes
    /// exactly two u64 draws; variance 0 yields exactly 0 without draws.
    std::complex<double> next_complex_gaussian(double variance);

    /// Independent child stream; deterministic function of this stream.
    Rng split();

    /// Stateless seed derivation for partitioning work units.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0);

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Free-function form of drawing one CN(0, variance) sample from a stream.
std::complex<double> sample_complex_gaussian(Rng& rng, double variance);

}  // namespace daf::math

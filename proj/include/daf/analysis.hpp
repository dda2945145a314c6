// analysis.hpp - closed-form and numerical error-rate machinery for the
// optimum-weight benchmark: effective SNR factors, the pairwise error
// probability integral, its high-power bound and the error-floor forms.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "daf/math.hpp"

namespace daf::analysis {

using Complex = std::complex<double>;

// Inputs of the pairwise-error-probability integral.
struct PepInputs {
    double alpha0 = 1.0;          // direct-link autocorrelation
    std::vector<double> alphai;   // cascaded-link autocorrelations
    std::vector<double> A;        // relay amplification factors
    double P0 = 1.0;              // source power
    double dmin2 = 4.0;           // squared minimum constellation distance
    int quadrature_nodes = 64;

    int relays() const { return static_cast<int>(alphai.size()); }
    void validate() const;
};

/// Effective direct-branch SNR factor
/// alpha0^2 P0 / (2 P0 (1-alpha0^2) + 4 + 2/P0).
double gamma0(double alpha0, double P0);

/// Relay-branch counterpart with the conditional received SNR rho_i.
double gamma_i(double alphai, double rho_i);

/// High-power limit alpha^2 / (2 (1-alpha^2)); +infinity at alpha = 1.
double gamma_bar(double alpha);

struct GammaBarSet {
    double gbar0 = 0.0;
    std::vector<double> gbari;

    bool all_finite() const;
    static GammaBarSet from_alphas(double alpha0, std::span<const double> alphai);
};

/// PEP conditioned on the instantaneous relay-destination gains.
double pep_conditional(const PepInputs& inputs, std::span<const Complex> h_rd);

/// Relay factor I_i(theta): the relay-branch MGF averaged over the
/// exponentially distributed |h_rd|^2.
double relay_mgf_average(double theta, double alpha_i, double A_i, double P0,
                         double dmin2);

/// Unconditional PEP over the quadrature rule in inputs.
double pep_unconditional(const PepInputs& inputs);

/// Nearest-neighbour bit error rate from a pairwise error probability;
/// exact for M = 2.
double ber_from_pep(double pep, int M);

/// theta = pi/2 bound: prod_i I_i(pi/2) / (2 + gamma0 dmin2).
double pep_upper_bound(const PepInputs& inputs);

struct ErrorFloor {
    double value = 0.0;
    bool exists = false;  // false when some branch never decorrelates
};

/// High-power PEP limit from the closed partial-fraction forms, selected
/// by the equality pattern of the gamma-bar set.
ErrorFloor error_floor(const GammaBarSet& gbars, double dmin2);

/// Same limit evaluated by quadrature of the limiting integrand; serves
/// as the reference route and covers degenerate equality patterns.
double floor_from_quadrature(const GammaBarSet& gbars, double dmin2, int nodes = 128);

}  // namespace daf::analysis

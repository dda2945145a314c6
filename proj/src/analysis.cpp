#include "daf/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace daf::analysis {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Relative equality used to pick a floor form.
bool rel_equal(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// (2l choose l) in exact integer arithmetic.
double central_binomial(int l) {
    std::uint64_t c = 1;
    for (int k = 0; k < l; ++k) c = c * 2 * (2 * k + 1) / (k + 1);
    return static_cast<double>(c);
}

long double single_branch_floor(long double g, long double d2) {
    return 0.5L * (1.0L - std::sqrt(g * d2 / (2.0L + g * d2)));
}

}  // namespace

void PepInputs::validate() const {
    if (alphai.size() != A.size())
        throw std::invalid_argument("PepInputs: alpha/gain size mismatch");
    if (!(P0 > 0.0)) throw std::invalid_argument("PepInputs: P0 must be > 0");
    if (!(dmin2 > 0.0) || dmin2 > 4.0)
        throw std::invalid_argument("PepInputs: dmin2 outside (0, 4]");
    if (!(alpha0 >= 0.0) || alpha0 > 1.0)
        throw std::invalid_argument("PepInputs: alpha0 outside [0, 1]");
    for (double a : alphai)
        if (!(a >= 0.0) || a > 1.0)
            throw std::invalid_argument("PepInputs: alphai outside [0, 1]");
    for (double a : A)
        if (a < 0.0) throw std::invalid_argument("PepInputs: negative gain");
    if (quadrature_nodes < 2)
        throw std::invalid_argument("PepInputs: need at least 2 quadrature nodes");
}

double gamma0(double alpha0, double P0) {
    return alpha0 * alpha0 * P0 /
           (2.0 * P0 * (1.0 - alpha0 * alpha0) + 4.0 + 2.0 / P0);
}

double gamma_i(double alphai, double rho_i) {
    return alphai * alphai * rho_i /
           (2.0 * rho_i * (1.0 - alphai * alphai) + 4.0 + 2.0 / rho_i);
}

double gamma_bar(double alpha) {
    if (!(alpha >= 0.0) || alpha > 1.0)
        throw std::invalid_argument("gamma_bar: alpha outside [0, 1]");
    if (alpha == 1.0) return std::numeric_limits<double>::infinity();
    return alpha * alpha / (2.0 * (1.0 - alpha * alpha));
}

bool GammaBarSet::all_finite() const {
    if (!std::isfinite(gbar0)) return false;
    for (double g : gbari)
        if (!std::isfinite(g)) return false;
    return true;
}

GammaBarSet GammaBarSet::from_alphas(double alpha0, std::span<const double> alphai) {
    GammaBarSet set;
    set.gbar0 = gamma_bar(alpha0);
    set.gbari.reserve(alphai.size());
    for (double a : alphai) set.gbari.push_back(gamma_bar(a));
    return set;
}

double pep_conditional(const PepInputs& inputs, std::span<const Complex> h_rd) {
    inputs.validate();
    if (h_rd.size() != inputs.alphai.size())
        throw std::invalid_argument("pep_conditional: need one gain per relay");

    const double g0 = gamma0(inputs.alpha0, inputs.P0);
    std::vector<double> gi(h_rd.size());
    for (std::size_t i = 0; i < h_rd.size(); ++i) {
        const double A2 = inputs.A[i] * inputs.A[i];
        const double eta = std::norm(h_rd[i]);
        const double sigma2 = A2 * eta + 1.0;
        const double rho = A2 * inputs.P0 * eta / sigma2;
        gi[i] = rho > 0.0 ? gamma_i(inputs.alphai[i], rho) : 0.0;
    }

    const auto rule = math::gauss_legendre_rule(inputs.quadrature_nodes);
    const double d2 = inputs.dmin2;
    const double value = rule.integrate([&](double theta) {
        const double two_s2 = 2.0 * std::sin(theta) * std::sin(theta);
        double f = 1.0 / (1.0 + g0 * d2 / two_s2);
        for (double g : gi) f /= (1.0 + g * d2 / two_s2);
        return f;
    }) / kPi;
    if (!std::isfinite(value))
        throw std::runtime_error("pep_conditional: quadrature produced non-finite value");
    return value;
}

double relay_mgf_average(double theta, double alpha_i, double A_i, double P0,
                         double dmin2) {
    const double A2 = A_i * A_i;
    if (A2 * P0 == 0.0) return 1.0;  // silent relay contributes no branch
    const double a2 = alpha_i * alpha_i;
    const double s2 = std::sin(theta) * std::sin(theta);
    const double base = a2 * A2 * P0 * dmin2 / s2 + 4.0 * (1.0 - a2) * A2 * P0 + 8.0 * A2;
    const double eps_big = (4.0 * (1.0 - a2) * A2 * P0 + 8.0 * A2) / base;
    const double beta = 4.0 / (2.0 * (1.0 - a2) * A2 * P0 + 4.0 * A2);
    const double eps_small = 8.0 / base;
    return eps_big * (1.0 + (beta - eps_small) * math::expx_expint_e1(eps_small));
}

double pep_unconditional(const PepInputs& inputs) {
    inputs.validate();
    const double g0 = gamma0(inputs.alpha0, inputs.P0);
    const double d2 = inputs.dmin2;
    const auto rule = math::gauss_legendre_rule(inputs.quadrature_nodes);
    const double value = rule.integrate([&](double theta) {
        const double two_s2 = 2.0 * std::sin(theta) * std::sin(theta);
        double f = 1.0 / (1.0 + g0 * d2 / two_s2);
        for (int i = 0; i < inputs.relays(); ++i)
            f *= relay_mgf_average(theta, inputs.alphai[i], inputs.A[i], inputs.P0, d2);
        return f;
    }) / kPi;
    if (!std::isfinite(value))
        throw std::runtime_error("pep_unconditional: quadrature produced non-finite value");
    return value;
}

double ber_from_pep(double pep, int M) {
    if (M < 2) throw std::invalid_argument("ber_from_pep: M must be >= 2");
    if (M == 2) return pep;  // single nearest neighbour, exact
    return 2.0 * pep / std::log2(static_cast<double>(M));
}

double pep_upper_bound(const PepInputs& inputs) {
    inputs.validate();
    double bound = 1.0 / (2.0 + gamma0(inputs.alpha0, inputs.P0) * inputs.dmin2);
    for (int i = 0; i < inputs.relays(); ++i)
        bound *= relay_mgf_average(kPi / 2.0, inputs.alphai[i], inputs.A[i], inputs.P0,
                                   inputs.dmin2);
    return bound;
}

namespace {

// All branch factors equal: closed form with central binomials.
long double floor_all_equal(long double g, int R, long double d2) {
    const long double q = 1.0L / (4.0L + 2.0L * g * d2);
    long double sum = 0.0L, qpow = 1.0L;
    for (int l = 0; l <= R; ++l) {
        sum += static_cast<long double>(central_binomial(l)) * qpow;
        qpow *= q;
    }
    return 0.5L * (1.0L - std::sqrt(g * d2 / (g * d2 + 2.0L)) * sum);
}

// All branch factors pairwise distinct: partial fractions.
long double floor_all_distinct(const std::vector<long double>& g, long double d2) {
    const int n = static_cast<int>(g.size());  // R + 1 factors
    long double total = 0.0L;
    for (int k = 0; k < n; ++k) {
        long double coeff = 1.0L;
        for (int j = 0; j < n; ++j)
            if (j != k) coeff *= g[k] / (g[k] - g[j]);
        total += coeff * (1.0L - std::sqrt(g[k] * d2 / (2.0L + g[k] * d2)));
    }
    return 0.5L * total;
}

// Direct factor distinct from one repeated relay factor.
long double floor_mixed(long double g0, long double g, int R, long double d2) {
    long double value = 1.0L;
    for (int i = 0; i < R; ++i) value *= g0 / (g0 - g);
    value *= single_branch_floor(g0, d2);

    const long double q = 1.0L / (4.0L + 2.0L * g * d2);
    const long double root = std::sqrt(g * d2 / (g * d2 + 2.0L));
    long double inner = 0.0L, qpow = 1.0L;
    for (int k = 1; k <= R; ++k) {
        inner += static_cast<long double>(central_binomial(k - 1)) * qpow;
        qpow *= q;
        long double coeff = g / (2.0L * (g0 - g));
        for (int i = 0; i < R - k; ++i) coeff *= g0 / (g0 - g);
        value -= coeff * (1.0L - root * inner);
    }
    return value;
}

}  // namespace

double floor_from_quadrature(const GammaBarSet& gbars, double dmin2, int nodes) {
    const auto rule = math::gauss_legendre_rule(nodes);
    return rule.integrate([&](double theta) {
        const double two_s2 = 2.0 * std::sin(theta) * std::sin(theta);
        double f = 1.0 / (1.0 + gbars.gbar0 * dmin2 / two_s2);
        for (double g : gbars.gbari) f /= (1.0 + g * dmin2 / two_s2);
        return f;
    }) / kPi;
}

ErrorFloor error_floor(const GammaBarSet& gbars, double dmin2) {
    if (!gbars.all_finite()) return {0.0, false};  // no floor on a static link
    constexpr double kEqualTol = 1e-9;
    constexpr double kDegenerateTol = 1e-6;  // partial fractions cancel below this

    const int R = static_cast<int>(gbars.gbari.size());
    const long double d2 = dmin2;
    if (R == 0)
        return {static_cast<double>(single_branch_floor(gbars.gbar0, d2)), true};

    bool relays_equal = true, relays_near_equal = true;
    for (int i = 1; i < R; ++i) {
        relays_equal &= rel_equal(gbars.gbari[i], gbars.gbari[0], kEqualTol);
        relays_near_equal &= rel_equal(gbars.gbari[i], gbars.gbari[0], kDegenerateTol);
    }

    if (relays_near_equal) {
        long double g = 0.0L;
        for (double v : gbars.gbari) g += v;
        g /= R;
        const bool direct_matches =
            rel_equal(gbars.gbar0, static_cast<double>(g),
                      relays_equal ? kEqualTol : kDegenerateTol);
        if (direct_matches) {
            const long double pooled = (gbars.gbar0 + g * R) / (R + 1);
            return {static_cast<double>(floor_all_equal(pooled, R, d2)), true};
        }
        if (rel_equal(gbars.gbar0, static_cast<double>(g), kDegenerateTol)) {
            // Too close for the mixed form, not close enough to pool.
            return {floor_from_quadrature(gbars, dmin2), true};
        }
        return {static_cast<double>(floor_mixed(gbars.gbar0, g, R, d2)), true};
    }

    // Distinct relay factors: use partial fractions when every pairwise
    // gap is wide enough for the cancellations to stay benign.
    std::vector<long double> all(1, gbars.gbar0);
    for (double v : gbars.gbari) all.push_back(v);
    bool well_separated = true;
    for (std::size_t a = 0; a < all.size() && well_separated; ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (rel_equal(static_cast<double>(all[a]), static_cast<double>(all[b]),
                          kDegenerateTol)) {
                well_separated = false;
                break;
            }
    if (well_separated)
        return {static_cast<double>(floor_all_distinct(all, d2)), true};
    return {floor_from_quadrature(gbars, dmin2), true};
}

}  // namespace daf::analysis

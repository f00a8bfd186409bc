#ifndef CHAOSSEP_RATES_HPP
#define CHAOSSEP_RATES_HPP

namespace chaossep {

enum class PolynomialId { New, Legacy };

struct GrowthRate {
    int p;
    double rho;          // root > 1
    PolynomialId id;
    double residual;     // |polynomial(rho)| evaluated in extended precision
};

/// Oscillation growth rate for odd prime period p: the unique root in
/// (sqrt(2), 2) of lambda^p - 2*lambda^(p-2) - 1 = 0.
GrowthRate rho(int p);

/// The earlier rate: root > 1 of z^(p-1) - z^(p-2) - 1 = 0. Coincides with
/// rho(p) at p = 3 and is strictly smaller for odd p >= 5.
GrowthRate rho_legacy(int p);

/// lambda^p - 2*lambda^(p-2) - 1, evaluated in extended precision.
double q_eval(int p, double lambda);

/// z^(p-1) - z^(p-2) - 1.
double legacy_eval(int p, double z);

/// pi_p(lambda) = lambda^(p-1) - lambda^(p-2) - sum_{j=0}^{p-3} (-lambda)^j.
/// Returns the sum form; away from lambda = -1 it cross-checks against the
/// rational form (lambda^p - 2 lambda^(p-2) - 1)/(lambda + 1) and throws on
/// disagreement beyond 1e-9 relative.
double pi_eval(int p, double lambda);

}  // namespace chaossep

#endif

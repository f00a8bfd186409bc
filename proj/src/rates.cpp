#include "chaossep/rates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chaossep {

namespace {

void require_odd_period(int p) {
    if (p < 3 || p % 2 == 0)
        throw std::invalid_argument("period must be odd and >= 3 (got " +
                                    std::to_string(p) + ")");
}

long double powl_int(long double base, int n) {
    long double r = 1.0L;
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

// lambda^p - 2 lambda^(p-2) - 1 = lambda^(p-2) (lambda^2 - 2) - 1.
// The factored form keeps the cancellation confined to lambda^2 - 2.
long double q_eval_l(int p, long double lambda) {
    return powl_int(lambda, p - 2) * (lambda * lambda - 2.0L) - 1.0L;
}

long double q_deriv_l(int p, long double lambda) {
    return p * powl_int(lambda, p - 1) - 2.0L * (p - 2) * powl_int(lambda, p - 3);
}

long double legacy_eval_l(int p, long double z) {
    return powl_int(z, p - 2) * (z - 1.0L) - 1.0L;
}

long double legacy_deriv_l(int p, long double z) {
    return (p - 1) * powl_int(z, p - 2) - (p - 2) * powl_int(z, p - 3);
}

template <typename F, typename DF>
double bracketed_root(F fn, DF dfn, long double lo, long double hi) {
    // Bisection down to a tight bracket, then Newton polish. Newton steps
    // falling outside the current bracket fall back to bisection.
    long double flo = fn(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-17L * hi; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double fm = fn(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    long double x = 0.5L * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const long double d = dfn(x);
        if (d == 0.0L) break;
        const long double step = fn(x) / d;
        const long double next = x - step;
        if (next <= lo || next >= hi) break;
        x = next;
    }
    return static_cast<double>(x);
}

}  // namespace

double q_eval(int p, double lambda) {
    return static_cast<double>(q_eval_l(p, lambda));
}

double legacy_eval(int p, double z) {
    return static_cast<double>(legacy_eval_l(p, z));
}

GrowthRate rho(int p) {
    require_odd_period(p);
    // q_p(sqrt 2) = -1 and q_p(2) = 2^(p-1) - 1 > 0: single sign change in
    // [sqrt 2, 2].
    const double root = bracketed_root([p](long double x) { return q_eval_l(p, x); },
                                       [p](long double x) { return q_deriv_l(p, x); },
                                       std::sqrt(2.0L), 2.0L);
    return {p, root, PolynomialId::New,
            static_cast<double>(std::fabs(q_eval_l(p, root)))};
}

GrowthRate rho_legacy(int p) {
    require_odd_period(p);
    // legacy(1) = -1, legacy(2) = 2^(p-2) - 1 > 0.
    const double root = bracketed_root([p](long double z) { return legacy_eval_l(p, z); },
                                       [p](long double z) { return legacy_deriv_l(p, z); },
                                       1.0L, 2.0L);
    return {p, root, PolynomialId::Legacy,
            static_cast<double>(std::fabs(legacy_eval_l(p, root)))};
}

double pi_eval(int p, double lambda) {
    require_odd_period(p);
    long double sum = 0.0L;
    long double term = 1.0L;  // (-lambda)^0
    for (int j = 0; j <= p - 3; ++j) {
        sum += term;
        term *= -static_cast<long double>(lambda);
    }
    const long double value =
        powl_int(lambda, p - 1) - powl_int(lambda, p - 2) - sum;

    if (std::abs(lambda + 1.0) > 1e-12) {
        const long double rational = q_eval_l(p, lambda) / (lambda + 1.0L);
        const long double tol = 1e-9L * std::max(1.0L, std::fabs(value));
        if (std::fabs(value - rational) > tol)
            throw std::runtime_error("pi_eval: sum and rational forms disagree");
    }
    return static_cast<double>(value);
}

}  // namespace chaossep

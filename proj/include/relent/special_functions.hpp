#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "relent/errors.hpp"

namespace relent {

namespace detail {

// Series expansion of P(s,x), valid and fast for x < s+1.
inline double gamma_p_series(double s, double x) {
    double ap = s;
    double term = 1.0 / s;
    double sum = term;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw convergence_error("gamma_p series did not converge");
}

// Continued fraction for Q(s,x) = 1 - P(s,x), modified Lentz method,
// valid and fast for x >= s+1.
inline double gamma_q_contfrac(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw convergence_error("gamma_q continued fraction did not converge");
}

}  // namespace detail

// Regularized lower incomplete gamma function P(s,x), s > 0, x >= 0.
inline double regularized_gamma_p(double s, double x) {
    if (!(s > 0.0)) throw invalid_input("regularized_gamma_p: s must be > 0");
    if (!(x >= 0.0)) throw invalid_input("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < s + 1.0) return detail::gamma_p_series(s, x);
    return 1.0 - detail::gamma_q_contfrac(s, x);
}

// Complement Q(s,x) = 1 - P(s,x), kept to full relative precision in the
// tail where the subtraction would round away.
inline double regularized_gamma_q(double s, double x) {
    if (!(s > 0.0)) throw invalid_input("regularized_gamma_q: s must be > 0");
    if (!(x >= 0.0)) throw invalid_input("regularized_gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
    return detail::gamma_q_contfrac(s, x);
}

// Chi-square distribution function with df degrees of freedom.
inline double chi2_cdf(double x, int df) {
    if (df < 1) throw invalid_input("chi2_cdf: df must be >= 1");
    if (!(x >= 0.0)) throw invalid_input("chi2_cdf: x must be >= 0");
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

// Upper tail 1 - chi2_cdf, accurate for large x.
inline double chi2_sf(double x, int df) {
    if (df < 1) throw invalid_input("chi2_sf: df must be >= 1");
    if (!(x >= 0.0)) throw invalid_input("chi2_sf: x must be >= 0");
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

// Chi-square density, used for Newton refinement of the quantile.
inline double chi2_pdf(double x, int df) {
    if (x <= 0.0) return 0.0;
    double s = 0.5 * df;
    return std::exp((s - 1.0) * std::log(x) - 0.5 * x - s * std::log(2.0) - std::lgamma(s));
}

// Quantile of the chi-square distribution: x with chi2_cdf(x, df) = p.
// Bisection on an expanding bracket, refined with safeguarded Newton steps.
// Upper-tail probabilities are inverted through the survival function, which
// keeps its relative precision where 1 - p rounds badly.
inline double chi2_quantile(double p, int df) {
    if (df < 1) throw invalid_input("chi2_quantile: df must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw invalid_input("chi2_quantile: p must be in (0,1)");
    const bool upper = p > 0.5;
    const double q = 1.0 - p;
    // residual increasing in x on both branches
    auto resid = [&](double x) { return upper ? q - chi2_sf(x, df) : chi2_cdf(x, df) - p; };
    double lo = 0.0;
    double hi = df + 10.0;
    while (resid(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw convergence_error("chi2_quantile: bracket expansion failed");
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = resid(x);
        if (f > 0.0) hi = x; else lo = x;
        double dfdx = chi2_pdf(x, df);
        double xn = (dfdx > 0.0) ? x - f / dfdx : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-14 * (1.0 + x)) return xn;
        x = xn;
    }
    if (std::fabs(resid(x)) < 1e-9) return x;
    throw convergence_error("chi2_quantile did not converge");
}

}  // namespace relent

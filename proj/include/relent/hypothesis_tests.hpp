#pragma once

#include <cmath>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/errors.hpp"
#include "relent/special_functions.hpp"

namespace relent {

// Outcome of a chi-square-calibrated divergence test.  The statistic is the
// 2nK quantity; reject means statistic >= critical_value (ties reject).
struct TestReport {
    double statistic = 0.0;
    int df = 0;
    double critical_value = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
};

namespace detail {

inline TestReport make_report(double statistic, int df, double alpha) {
    if (df < 1) throw invalid_input("test: df must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input("test: alpha must be in (0,1)");
    TestReport r;
    r.statistic = statistic;
    r.df = df;
    r.alpha = alpha;
    r.critical_value = chi2_quantile(1.0 - alpha, df);
    if (std::isinf(statistic)) {
        r.p_value = 0.0;  // hard falsification
        r.reject = true;
    } else {
        r.p_value = chi2_sf(statistic, df);
        r.reject = statistic >= r.critical_value;
    }
    return r;
}

}  // namespace detail

// Test of the single hypothesis "the model distribution is fM" at level alpha:
// reject when 2 n K(fD||fM) >= chi^2_{1-alpha}[m-1].
inline TestReport test_simple(const Distribution& fD, const Distribution& fM, long n,
                              double alpha) {
    if (fD.size() != fM.size()) throw invalid_input("test_simple: length mismatch");
    if (n < 1) throw invalid_input("test_simple: n must be >= 1");
    double stat = 2.0 * n * relative_entropy(fD, fM);
    return detail::make_report(stat, static_cast<int>(fD.size()) - 1, alpha);
}

// Composite test against a fitted family member: 2 n K(fD||fitted) with
// df = dim(S) - dim(M).  dim_M == dim_S is the saturated model and is refused.
inline TestReport test_composite(const Distribution& fD, const Distribution& fitted, int dim_S,
                                 int dim_M, long n, double alpha) {
    if (fD.size() != fitted.size()) throw invalid_input("test_composite: length mismatch");
    if (dim_M >= dim_S)
        throw invalid_input("test_composite: saturated model (dim_M >= dim_S)");
    double stat = 2.0 * n * relative_entropy(fD, fitted);
    return detail::make_report(stat, dim_S - dim_M, alpha);
}

// Nested test of M0 within M1 from their two fits:
// statistic 2n [K(fD||fit0) - K(fD||fit1)], df supplied by the caller.
inline TestReport test_nested(const Distribution& fD, const Distribution& fit0,
                              const Distribution& fit1, int df_delta, long n, double alpha) {
    if (fD.size() != fit0.size() || fD.size() != fit1.size())
        throw invalid_input("test_nested: length mismatch");
    double k0 = relative_entropy(fD, fit0);
    double k1 = relative_entropy(fD, fit1);
    double diff = k0 - k1;
    if (std::isinf(k0) && std::isinf(k1)) throw invalid_input("test_nested: both fits infinite");
    if (diff < -1e-9)
        throw invalid_input("test_nested: K(fD||fit0) < K(fD||fit1); fits are not nested");
    if (diff < 0.0) diff = 0.0;
    return detail::make_report(2.0 * n * diff, df_delta, alpha);
}

// Multiplicative (geometric) mixture f(mu) ~ f0^mu f1^(1-mu), normalized over
// the common support.  Endpoints return the inputs unchanged.
inline Distribution np_mixture(const Distribution& f0, const Distribution& f1, double mu) {
    if (f0.size() != f1.size()) throw invalid_input("np_mixture: length mismatch");
    if (!(mu >= 0.0 && mu <= 1.0)) throw invalid_input("np_mixture: mu must be in [0,1]");
    if (mu == 1.0) return f0;
    if (mu == 0.0) return f1;
    std::vector<double> w(f0.size(), 0.0);
    double z = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (f0[j] > 0.0 && f1[j] > 0.0) {
            w[j] = std::exp(mu * std::log(f0[j]) + (1.0 - mu) * std::log(f1[j]));
            z += w[j];
        }
    }
    if (!(z > 0.0)) throw invalid_input("np_mixture: empty common support");
    return Distribution::from_weights(std::move(w));
}

namespace detail {

// ln Z(mu) = ln sum over common support of f0^mu f1^(1-mu); convex in mu.
inline double np_log_partition(const Distribution& f0, const Distribution& f1, double mu) {
    double z = 0.0;
    for (std::size_t j = 0; j < f0.size(); ++j)
        if (f0[j] > 0.0 && f1[j] > 0.0)
            z += std::exp(mu * std::log(f0[j]) + (1.0 - mu) * std::log(f1[j]));
    return z > 0.0 ? std::log(z) : -kInfinity;
}

}  // namespace detail

// Solves K(f(mu)||f0) - K(f(mu)||f1) = tau for mu in [0,1] by bisection.
// The difference decreases from K(f1||f0) at mu=0 to -K(f0||f1) at mu=1.
// The degenerate case f0 == f1 returns 0.5 by convention.
inline double np_solve_mu(const Distribution& f0, const Distribution& f1, double tau) {
    if (f0.size() != f1.size()) throw invalid_input("np_solve_mu: length mismatch");
    bool equal = true;
    for (std::size_t j = 0; j < f0.size(); ++j)
        if (f0[j] != f1[j]) { equal = false; break; }
    if (equal) {
        if (tau != 0.0) throw infeasible_error("np_solve_mu: tau unattainable for f0 == f1");
        return 0.5;
    }
    auto diff = [&](double mu) {
        Distribution fm = np_mixture(f0, f1, mu);
        return relative_entropy(fm, f0) - relative_entropy(fm, f1);
    };
    double d0 = diff(0.0);
    double d1 = diff(1.0);
    if (tau > d0 || tau < d1) throw infeasible_error("np_solve_mu: tau outside attainable range");
    if (tau == d0) return 0.0;
    if (tau == d1) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double d = diff(mid);
        if (std::fabs(d - tau) <= 1e-9) return mid;
        if (d > tau) lo = mid; else hi = mid;
    }
    // An unreachable tau can hide in the discontinuity at an endpoint when
    // the supports differ; the bracket then collapses without convergence.
    double mid = 0.5 * (lo + hi);
    if (std::fabs(diff(mid) - tau) > 1e-7)
        throw infeasible_error("np_solve_mu: tau unattainable (support mismatch gap)");
    return mid;
}

struct ChernoffResult {
    double information = 0.0;  // C(f0,f1) in nats
    double mu_star = 0.5;      // minimizer of ln Z(mu)
};

// Chernoff information C(f0,f1) = -min_{mu in [0,1]} ln Z(mu), found by
// golden-section search; ln Z is convex so the bracket contraction is safe.
inline ChernoffResult chernoff_information(const Distribution& f0, const Distribution& f1) {
    if (f0.size() != f1.size()) throw invalid_input("chernoff_information: length mismatch");
    auto lnz = [&](double mu) { return detail::np_log_partition(f0, f1, mu); };
    if (std::isinf(lnz(0.5))) return {kInfinity, 0.5};  // disjoint supports
    const double gr = 0.6180339887498948482;
    double a = 0.0, b = 1.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = lnz(c), fd = lnz(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = lnz(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = lnz(d);
        }
    }
    double mu = 0.5 * (a + b);
    double val = -lnz(mu);
    // the optimum can sit on an endpoint (e.g. one support strictly inside the other)
    for (double cand : {0.0, 1.0})
        if (-lnz(cand) > val) { val = -lnz(cand); mu = cand; }
    return {val, mu};
}

}  // namespace relent

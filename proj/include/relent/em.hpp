#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/errors.hpp"

namespace relent {

// A finite mixture with c fixed component distributions h^q over M groups
// and an observed distribution F over the same groups.  Only the mixing
// proportions are adjustable, which keeps the model family convex and the
// minimizer unique.
struct MixtureProblem {
    std::vector<Distribution> components;
    Distribution observed;

    MixtureProblem(std::vector<Distribution> comps, Distribution obs)
        : components(std::move(comps)), observed(std::move(obs)) {
        if (components.empty()) throw invalid_input("MixtureProblem: no components");
        for (const auto& h : components)
            if (h.size() != observed.size())
                throw invalid_input("MixtureProblem: component/observed length mismatch");
        for (std::size_t J = 0; J < observed.size(); ++J) {
            if (observed[J] == 0.0) continue;
            bool covered = false;
            for (const auto& h : components)
                if (h[J] > 0.0) { covered = true; break; }
            if (!covered)
                throw invalid_input("MixtureProblem: observed mass outside all "
                                    "component supports");
        }
    }

    std::size_t component_count() const { return components.size(); }
    std::size_t group_count() const { return observed.size(); }
};

// G_J(rho) = sum_q rho_q h^q_J.
inline Distribution mixture_predict(const MixtureProblem& p, const Distribution& rho) {
    if (rho.size() != p.component_count())
        throw invalid_input("mixture_predict: rho length mismatch");
    std::vector<double> g(p.group_count(), 0.0);
    for (std::size_t q = 0; q < p.component_count(); ++q)
        for (std::size_t J = 0; J < p.group_count(); ++J)
            g[J] += rho[q] * p.components[q][J];
    return Distribution::from_weights(std::move(g));
}

struct EMTrace {
    Distribution rho;
    std::vector<double> divergence_path;  // K(F||G) after each update
    int iterations = 0;
    bool converged = false;
};

// EM for the mixing proportions: the multiplicative update
//   rho_q <- rho_q sum_J h^q_J F_J / G_J(rho),
// iterated until the largest proportion change drops below tol.  Weights are
// floored at 1e-15 and renormalized each step so rounding cannot create an
// absorbing zero that the exact update would avoid.
inline EMTrace em_fit(const MixtureProblem& p, const Distribution& rho0, double tol = 1e-10,
                      int max_iter = 10000) {
    if (rho0.size() != p.component_count()) throw invalid_input("em_fit: rho0 length mismatch");
    for (std::size_t q = 0; q < rho0.size(); ++q)
        if (!(rho0[q] > 0.0))
            throw invalid_input("em_fit: rho0 must be strictly positive (zero weights are "
                                "absorbing)");
    const std::size_t c = p.component_count(), M = p.group_count();
    std::vector<double> rho(rho0.probs());

    EMTrace trace;
    trace.divergence_path.push_back(
        relative_entropy(p.observed, mixture_predict(p, Distribution::from_weights(rho))));

    int it = 0;
    for (; it < max_iter; ++it) {
        std::vector<double> g(M, 0.0);
        for (std::size_t q = 0; q < c; ++q)
            for (std::size_t J = 0; J < M; ++J) g[J] += rho[q] * p.components[q][J];
        std::vector<double> next(c, 0.0);
        for (std::size_t q = 0; q < c; ++q) {
            double s = 0.0;
            for (std::size_t J = 0; J < M; ++J)
                if (p.observed[J] > 0.0) s += p.components[q][J] * p.observed[J] / g[J];
            next[q] = rho[q] * s;
        }
        double total = 0.0;
        for (double& x : next) {
            if (x < 1e-15) x = 1e-15;
            total += x;
        }
        for (double& x : next) x /= total;

        double delta = 0.0;
        for (std::size_t q = 0; q < c; ++q) delta = std::max(delta, std::fabs(next[q] - rho[q]));
        rho = next;
        trace.divergence_path.push_back(
            relative_entropy(p.observed, mixture_predict(p, Distribution::from_weights(rho))));
        if (delta < tol) { trace.converged = true; ++it; break; }
    }
    trace.rho = Distribution::from_weights(rho);
    trace.iterations = it;
    return trace;
}

// A projection contract: returns the family member closest to the argument
// in the relevant relative-entropy sense.
using Projection = std::function<Distribution(const Distribution&)>;

struct AlternatingTrace {
    Distribution f;  // final data-side iterate
    Distribution g;  // final model-side iterate
    std::vector<double> divergence_path;  // K(f^(t)||g^(t))
    int iterations = 0;
    bool converged = false;
};

// Alternating minimization of K(f||g) over f in F, g in G:
//   f^(t) = argmin_{f in F} K(f||g^(t)),  g^(t+1) = argmin_{g in G} K(f^(t)||g).
// Each projection must not increase the objective; a rise beyond 1e-12 means
// the supplied projection violates its contract and is reported as such.
inline AlternatingTrace alternating_minimize(const Projection& project_F,
                                             const Projection& project_G,
                                             const Distribution& g0, double tol = 1e-10,
                                             int max_iter = 10000) {
    if (!(tol > 0.0)) throw invalid_input("alternating_minimize: tol must be > 0");
    AlternatingTrace trace;
    Distribution g = g0;
    Distribution f = project_F(g);
    double k = relative_entropy(f, g);
    trace.divergence_path.push_back(k);
    int it = 0;
    for (; it < max_iter; ++it) {
        Distribution g_next = project_G(f);
        double k_half = relative_entropy(f, g_next);
        // g0 need not belong to the model family, so the very first model
        // projection may legitimately raise the divergence
        if (it > 0 && k_half > k + 1e-12)
            throw invalid_input("alternating_minimize: model-side projection increased "
                                "the divergence (contract violation)");
        Distribution f_next = project_F(g_next);
        double k_next = relative_entropy(f_next, g_next);
        if (k_next > k_half + 1e-12)
            throw invalid_input("alternating_minimize: data-side projection increased "
                                "the divergence (contract violation)");
        f = f_next;
        g = g_next;
        trace.divergence_path.push_back(k_next);
        double drop = k - k_next;
        k = k_next;
        // the first cycle may raise the divergence when g0 lies outside the
        // model family, so it never counts as converged
        if (it > 0 && drop >= 0.0 && drop < tol) { trace.converged = true; ++it; break; }
    }
    trace.f = f;
    trace.g = g;
    trace.iterations = it;
    return trace;
}

}  // namespace relent

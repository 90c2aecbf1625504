#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/errors.hpp"

namespace relent {

// A finite set of simple hypotheses g^a with strictly positive priors.
struct HypothesisSet {
    std::vector<Distribution> models;
    Distribution priors;

    HypothesisSet(std::vector<Distribution> models_in, Distribution priors_in)
        : models(std::move(models_in)), priors(std::move(priors_in)) {
        if (models.empty()) throw invalid_input("HypothesisSet: no models");
        if (priors.size() != models.size())
            throw invalid_input("HypothesisSet: prior/model count mismatch");
        for (std::size_t a = 0; a < models.size(); ++a) {
            if (models[a].size() != models[0].size())
                throw invalid_input("HypothesisSet: model length mismatch");
            if (!(priors[a] > 0.0)) throw invalid_input("HypothesisSet: priors must be > 0");
        }
    }
};

// Posterior over hypotheses: proportional to P(g^a) exp(-n K(fD||g^a)),
// accumulated in log space with a max shift.  Models with infinite
// divergence receive posterior zero.
inline Distribution posterior_over_hypotheses(const HypothesisSet& h, const Distribution& fD,
                                              long n) {
    if (n < 1) throw invalid_input("posterior_over_hypotheses: n must be >= 1");
    std::size_t q = h.models.size();
    std::vector<double> logw(q);
    double shift = -kInfinity;
    for (std::size_t a = 0; a < q; ++a) {
        double k = relative_entropy(fD, h.models[a]);
        logw[a] = std::isinf(k) ? -kInfinity : std::log(h.priors[a]) - n * k;
        if (logw[a] > shift) shift = logw[a];
    }
    if (std::isinf(shift))
        throw invalid_input("posterior_over_hypotheses: every model is strictly refuted");
    std::vector<double> w(q, 0.0);
    for (std::size_t a = 0; a < q; ++a)
        if (!std::isinf(logw[a])) w[a] = std::exp(logw[a] - shift);
    return Distribution::from_weights(std::move(w));
}

// The finite-n selection functional K(fD||g^a) - (1/n) ln P(g^a) per
// hypothesis; its argmin is the posterior's argmax.
inline std::vector<double> penalized_score(const HypothesisSet& h, const Distribution& fD,
                                           long n) {
    if (n < 1) throw invalid_input("penalized_score: n must be >= 1");
    std::vector<double> s(h.models.size());
    for (std::size_t a = 0; a < h.models.size(); ++a)
        s[a] = relative_entropy(fD, h.models[a]) - std::log(h.priors[a]) / n;
    return s;
}

// Ties broken toward the lowest index.
inline std::size_t argmin_score(const std::vector<double>& s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < s.size(); ++a)
        if (s[a] < s[best]) best = a;
    return best;
}

inline std::size_t argmax_posterior(const Distribution& post) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < post.size(); ++a)
        if (post[a] > post[best]) best = a;
    return best;
}

// Dirichlet parameters alpha_j > 0 with their mean pi and total strength.
struct DirichletParams {
    std::vector<double> alpha_vec;
    double alpha_total = 0.0;
    Distribution pi;

    explicit DirichletParams(std::vector<double> alphas) : alpha_vec(std::move(alphas)) {
        if (alpha_vec.empty()) throw invalid_input("DirichletParams: empty");
        for (double a : alpha_vec) {
            if (!(a > 0.0)) throw invalid_input("DirichletParams: alphas must be > 0");
            alpha_total += a;
        }
        pi = Distribution::from_weights(alpha_vec);
    }
};

// Posterior mean after observing integer counts: the convex combination
// lambda pi + (1-lambda) fD with lambda = alpha/(alpha+n); the prior acts as
// alpha pseudo-observations.  n = 0 returns pi itself.
inline Distribution dirichlet_posterior_mean(const DirichletParams& d,
                                             const std::vector<long>& counts) {
    if (counts.size() != d.alpha_vec.size())
        throw invalid_input("dirichlet_posterior_mean: counts length mismatch");
    long n = 0;
    for (long c : counts) {
        if (c < 0) throw invalid_input("dirichlet_posterior_mean: negative count");
        n += c;
    }
    if (n == 0) return d.pi;
    std::vector<double> w(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j)
        w[j] = d.alpha_vec[j] + static_cast<double>(counts[j]);
    return Distribution::from_weights(std::move(w));
}

}  // namespace relent

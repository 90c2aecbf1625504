#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <utility>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/errors.hpp"
#include "relent/rng.hpp"
#include "relent/tables.hpp"

namespace relent {

// A linear observable with a prescribed empirical mean: sum_j f_j a_j = target.
struct LinearConstraint {
    std::vector<double> coeffs;
    double target = 0.0;
};

struct MaxentResult {
    Distribution projected;
    std::vector<double> multipliers;  // one theta per constraint; +-inf flags a boundary target
    double divergence = 0.0;          // K(projected || prior)
    int iterations = 0;
    bool converged = true;
};

namespace detail {

// Tilted distribution fM_j exp(theta a_j) / Z, computed with a max shift.
inline std::vector<double> tilt(const Distribution& fM, const std::vector<double>& a,
                                double theta) {
    double shift = -kInfinity;
    for (std::size_t j = 0; j < fM.size(); ++j)
        if (fM[j] > 0.0) shift = std::max(shift, theta * a[j]);
    std::vector<double> w(fM.size(), 0.0);
    double z = 0.0;
    for (std::size_t j = 0; j < fM.size(); ++j) {
        if (fM[j] > 0.0) w[j] = fM[j] * std::exp(theta * a[j] - shift);
        z += w[j];
    }
    for (double& x : w) x /= z;
    return w;
}

inline double tilted_mean(const std::vector<double>& f, const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * a[j];
    return s;
}

}  // namespace detail

// Projection of the prior fM onto {f : sum f_j a_j = target}: the exponential
// tilt fM_j exp(theta a_j)/Z(theta).  The mean is strictly increasing in
// theta, so theta is found by expanding a bracket and bisecting the residual
// down to tol.  Boundary targets (the extreme values of a on the prior's
// support) return the limiting distribution with an infinite multiplier.
inline MaxentResult maxent_linear(const Distribution& fM, const LinearConstraint& c,
                                  double tol = 1e-12) {
    if (fM.size() != c.coeffs.size()) throw invalid_input("maxent_linear: length mismatch");
    if (!(tol > 0.0)) throw invalid_input("maxent_linear: tol must be > 0");
    const std::vector<double>& a = c.coeffs;
    double amin = kInfinity, amax = -kInfinity;
    for (std::size_t j = 0; j < fM.size(); ++j)
        if (fM[j] > 0.0) {
            amin = std::min(amin, a[j]);
            amax = std::max(amax, a[j]);
        }
    if (c.target < amin - 1e-12 || c.target > amax + 1e-12)
        throw infeasible_error("maxent_linear: target outside the attainable range of a");
    if (amin == amax) {
        // constraint degenerate on the support; target == amin was checked above
        MaxentResult r{fM, {0.0}, 0.0, 0, true};
        return r;
    }
    const double upper_edge = amax - 1e-15 * std::max(1.0, std::fabs(amax));
    const double lower_edge = amin + 1e-15 * std::max(1.0, std::fabs(amin));
    if (c.target >= upper_edge || c.target <= lower_edge) {
        // boundary target: all mass on the extremal categories of a
        bool upper = c.target >= upper_edge;
        double extreme = upper ? amax : amin;
        std::vector<double> w(fM.size(), 0.0);
        for (std::size_t j = 0; j < fM.size(); ++j)
            if (fM[j] > 0.0 && a[j] == extreme) w[j] = fM[j];
        MaxentResult r{Distribution::from_weights(std::move(w)),
                       {upper ? kInfinity : -kInfinity}};
        r.divergence = relative_entropy(r.projected, fM);
        return r;
    }

    auto resid_at = [&](double theta) {
        return detail::tilted_mean(detail::tilt(fM, a, theta), a) - c.target;
    };
    double lo = -1.0, hi = 1.0;
    int it = 0;
    while (resid_at(lo) > 0.0) { lo *= 2.0; if (++it > 200) throw convergence_error("maxent_linear: bracket"); }
    while (resid_at(hi) < 0.0) { hi *= 2.0; if (++it > 200) throw convergence_error("maxent_linear: bracket"); }
    // bracketed secant with bisection fallback
    double flo = resid_at(lo), fhi = resid_at(hi);
    double theta = 0.5 * (lo + hi);
    for (int k = 0; k < 500; ++k) {
        double secant = (std::fabs(fhi - flo) > 0.0) ? hi - fhi * (hi - lo) / (fhi - flo)
                                                     : 0.5 * (lo + hi);
        theta = (secant > lo && secant < hi) ? secant : 0.5 * (lo + hi);
        double f = resid_at(theta);
        ++it;
        if (std::fabs(f) <= tol || hi - lo < 1e-16 * (1.0 + std::fabs(theta))) break;
        if (f < 0.0) { lo = theta; flo = f; } else { hi = theta; fhi = f; }
    }
    MaxentResult r{Distribution::from_weights(detail::tilt(fM, a, theta)), {theta}};
    r.divergence = relative_entropy(r.projected, fM);
    r.iterations = it;
    r.converged = std::fabs(detail::tilted_mean(r.projected.probs(), a) - c.target) <= 10 * tol;
    return r;
}

namespace detail {

// Solves the small symmetric system (H + ridge I) x = -g in place.
// Returns false if elimination breaks down.
inline bool solve_spd(std::vector<double> H, std::vector<double> g, std::size_t q,
                      double ridge, std::vector<double>& out) {
    for (std::size_t i = 0; i < q; ++i) H[i * q + i] += ridge;
    for (double& x : g) x = -x;
    // Gaussian elimination with partial pivoting
    std::vector<std::size_t> perm(q);
    for (std::size_t i = 0; i < q; ++i) perm[i] = i;
    for (std::size_t col = 0; col < q; ++col) {
        std::size_t piv = col;
        for (std::size_t rsel = col + 1; rsel < q; ++rsel)
            if (std::fabs(H[rsel * q + col]) > std::fabs(H[piv * q + col])) piv = rsel;
        if (std::fabs(H[piv * q + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t k = 0; k < q; ++k) std::swap(H[piv * q + k], H[col * q + k]);
            std::swap(g[piv], g[col]);
        }
        for (std::size_t rsel = col + 1; rsel < q; ++rsel) {
            double fctr = H[rsel * q + col] / H[col * q + col];
            for (std::size_t k = col; k < q; ++k) H[rsel * q + k] -= fctr * H[col * q + k];
            g[rsel] -= fctr * g[col];
        }
    }
    out.assign(q, 0.0);
    for (std::size_t i = q; i-- > 0;) {
        double s = g[i];
        for (std::size_t k = i + 1; k < q; ++k) s -= H[i * q + k] * out[k];
        out[i] = s / H[i * q + i];
    }
    for (double x : out)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

// Projection of the prior onto the intersection of several linear constraints:
// f_j = fM_j exp(sum_alpha lambda_alpha a^alpha_j) / Z(lambda).  The dual
// ln Z(lambda) - lambda . target is convex and is minimized by damped Newton
// with backtracking; coordinate steps take over if the Hessian degenerates.
inline MaxentResult maxent_multi(const Distribution& fM,
                                 const std::vector<LinearConstraint>& cs, double tol = 1e-10,
                                 int max_iter = 10000) {
    if (cs.empty()) throw invalid_input("maxent_multi: no constraints");
    if (!(tol > 0.0)) throw invalid_input("maxent_multi: tol must be > 0");
    const std::size_t m = fM.size(), q = cs.size();
    for (const auto& c : cs)
        if (c.coeffs.size() != m) throw invalid_input("maxent_multi: length mismatch");

    std::vector<double> lambda(q, 0.0);
    std::vector<double> f(fM.probs());

    auto refresh = [&](const std::vector<double>& lam) {
        // tilted distribution under lam, max-shifted
        double shift = -kInfinity;
        std::vector<double> score(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            if (fM[j] == 0.0) continue;
            double s = 0.0;
            for (std::size_t al = 0; al < q; ++al) s += lam[al] * cs[al].coeffs[j];
            score[j] = s;
            shift = std::max(shift, s);
        }
        std::vector<double> w(m, 0.0);
        double z = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (fM[j] > 0.0) w[j] = fM[j] * std::exp(score[j] - shift);
            z += w[j];
        }
        for (double& x : w) x /= z;
        double lnz = std::log(z) + shift;
        return std::pair(std::move(w), lnz);
    };
    auto dual = [&](const std::vector<double>& lam) {
        auto [w, lnz] = refresh(lam);
        double d = lnz;
        for (std::size_t al = 0; al < q; ++al) d -= lam[al] * cs[al].target;
        return d;
    };

    int it = 0;
    double resid = kInfinity;
    for (; it < max_iter; ++it) {
        auto [w, lnz] = refresh(lambda);
        f = w;
        std::vector<double> grad(q, 0.0), mean(q, 0.0);
        for (std::size_t al = 0; al < q; ++al) {
            mean[al] = detail::tilted_mean(f, cs[al].coeffs);
            grad[al] = mean[al] - cs[al].target;
        }
        resid = 0.0;
        for (double g : grad) resid = std::max(resid, std::fabs(g));
        if (resid < tol) break;

        // Hessian = covariance of the observables under f
        std::vector<double> H(q * q, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            if (f[j] == 0.0) continue;
            for (std::size_t al = 0; al < q; ++al) {
                double da = cs[al].coeffs[j] - mean[al];
                for (std::size_t be = al; be < q; ++be)
                    H[al * q + be] += f[j] * da * (cs[be].coeffs[j] - mean[be]);
            }
        }
        for (std::size_t al = 0; al < q; ++al)
            for (std::size_t be = 0; be < al; ++be) H[al * q + be] = H[be * q + al];

        std::vector<double> step;
        bool have_step = detail::solve_spd(H, grad, q, 1e-12, step);
        double g_dot_step = 0.0;
        if (have_step)
            for (std::size_t al = 0; al < q; ++al) g_dot_step += grad[al] * step[al];
        if (!have_step || g_dot_step > 0.0) {
            // coordinate-wise fallback: one-dimensional Newton on each multiplier
            step.assign(q, 0.0);
            for (std::size_t al = 0; al < q; ++al)
                if (H[al * q + al] > 1e-300) step[al] = -grad[al] / H[al * q + al];
        }

        double d0 = dual(lambda);
        double tstep = 1.0;
        std::vector<double> cand(q);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t al = 0; al < q; ++al) cand[al] = lambda[al] + tstep * step[al];
            // near the optimum the true decrease underflows; accepting a
            // rounding-level non-increase lets the final Newton step land
            if (dual(cand) <= d0 + 1e-14 * (1.0 + std::fabs(d0))) {
                lambda = cand;
                moved = true;
                break;
            }
            tstep *= 0.5;
        }
        if (!moved)
            throw convergence_error("maxent_multi: line search stalled before reaching "
                                    "tolerance");
        double norm = 0.0;
        for (double l : lambda) norm = std::max(norm, std::fabs(l));
        if (norm > 1e8)
            throw infeasible_error("maxent_multi: multipliers diverge; constraint set "
                                   "infeasible for this prior");
    }
    if (resid >= tol)
        throw convergence_error("maxent_multi: not converged after max_iter");

    MaxentResult r{Distribution::from_weights(std::move(f)), lambda};
    r.divergence = relative_entropy(r.projected, fM);
    r.iterations = it;
    return r;
}

// Boltzmann-Gibbs distribution exp(-beta E_j)/Z(beta), max-shifted.
inline Distribution boltzmann_gibbs(const std::vector<double>& energies, double beta) {
    if (energies.empty()) throw invalid_input("boltzmann_gibbs: empty energy vector");
    for (double e : energies)
        if (!std::isfinite(e)) throw invalid_input("boltzmann_gibbs: non-finite energy");
    double shift = -kInfinity;
    for (double e : energies) shift = std::max(shift, -beta * e);
    std::vector<double> w(energies.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(-beta * energies[j] - shift);
    return Distribution::from_weights(std::move(w));
}

// Projection under the knowledge that category j0 did not occur:
// zero it out and renormalize; K = -ln(1 - fM_{j0}).
inline MaxentResult maxent_unobserved(const Distribution& fM, std::size_t j0) {
    if (j0 >= fM.size()) throw invalid_input("maxent_unobserved: category out of range");
    if (fM[j0] >= 1.0)
        throw infeasible_error("maxent_unobserved: the excluded category carries all mass");
    std::vector<double> w(fM.probs());
    w[j0] = 0.0;
    MaxentResult r{Distribution::from_weights(std::move(w)), {}};
    r.divergence = -std::log1p(-fM[j0]);
    return r;
}

// Projection under coarse-grained observations FD: within each group the
// prior profile is kept, rescaled to the observed group mass (the E-step
// closed form); K = K(FD||FM).
inline MaxentResult maxent_coarse(const Distribution& fM, const Partition& p,
                                  const Distribution& FD) {
    if (fM.size() != p.category_count())
        throw invalid_input("maxent_coarse: partition/category mismatch");
    if (static_cast<int>(FD.size()) != p.group_count())
        throw invalid_input("maxent_coarse: group spec length mismatch");
    Distribution FM = coarse_grain(fM, p);
    for (std::size_t J = 0; J < FD.size(); ++J)
        if (FM[J] == 0.0 && FD[J] > 0.0)
            throw infeasible_error("maxent_coarse: observed mass in a group the prior excludes");
    std::vector<double> w(fM.size());
    for (std::size_t j = 0; j < fM.size(); ++j) {
        int J = p.group_of(j);
        w[j] = FM[J] > 0.0 ? fM[j] * FD[J] / FM[J] : 0.0;
    }
    MaxentResult r{Distribution::from_weights(std::move(w)), {}};
    r.divergence = relative_entropy(FD, FM);
    return r;
}

// Projection of a square-table prior onto the symmetric family:
// the normalized geometric means sqrt(fM_jk fM_kj) / Z.
inline MaxentResult maxent_symmetric(const JointTable& fM) {
    require_square(fM, "maxent_symmetric");
    std::size_t m = fM.rows();
    std::vector<double> w(m * m);
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            w[j * m + k] = std::sqrt(fM.at(j, k) * fM.at(k, j));
            z += w[j * m + k];
        }
    if (!(z > 0.0)) throw infeasible_error("maxent_symmetric: no symmetric support");
    JointTable proj = JointTable::from_weights(m, m, std::move(w));
    MaxentResult r{proj.flatten(), {}};
    r.divergence = detail::kl_raw(r.projected.probs(), fM.probs());
    return r;
}

// One sample size's worth of Monte-Carlo evidence for the large-deviation rate.
struct SanovPoint {
    long n = 0;
    long trials = 0;
    long hits = 0;
    double rate = 0.0;  // -ln(hits/trials)/n, meaningful only when hits > 0
};

struct SanovReport {
    std::vector<SanovPoint> points;
    double theoretical_rate = 0.0;  // K(projection || prior)
    double fitted_rate = 0.0;       // slope of -ln p_n against n (intercept absorbed)
    bool slope_valid = false;
    bool zero_hit_flag = false;     // some n produced no hits and was excluded
};

// Estimates P(empirical mean of a on the constraint side) for each n by
// simulation and regresses -ln p_n on n; the slope estimates the Sanov rate
// K(f~||fM).  The constraint is read as the one-sided event "mean >= target"
// when the target exceeds the prior mean, "mean <= target" otherwise.
// Trials run in fixed-size batches with seed-derived streams and integer
// merges, so results depend only on (seed, trials), never on the thread
// count or scheduling.
inline SanovReport sanov_mc_check(const Distribution& fM, const LinearConstraint& c,
                                  const std::vector<long>& n_values, long trials,
                                  std::uint64_t seed, int threads = 1) {
    if (trials < 1) throw invalid_input("sanov_mc_check: trials must be >= 1");
    if (n_values.empty()) throw invalid_input("sanov_mc_check: no sample sizes");
    if (fM.size() != c.coeffs.size()) throw invalid_input("sanov_mc_check: length mismatch");
    if (threads < 1) threads = 1;

    SanovReport rep;
    rep.theoretical_rate = maxent_linear(fM, c).divergence;

    double prior_mean = detail::tilted_mean(fM.probs(), c.coeffs);
    bool upper = c.target >= prior_mean;

    CategoricalSampler sampler(fM.probs());
    const long batch_size = 10000;
    for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
        long n = n_values[idx];
        if (n < 1) throw invalid_input("sanov_mc_check: n must be >= 1");
        auto run_batch = [&, n](long batch_index, long count) {
            Rng rng(derive_stream(seed, (idx << 32) + static_cast<std::uint64_t>(batch_index)));
            long h = 0;
            for (long t = 0; t < count; ++t) {
                double sum = 0.0;
                for (long i = 0; i < n; ++i) sum += c.coeffs[sampler(rng)];
                double mean = sum / n;
                if (upper ? mean >= c.target : mean <= c.target) ++h;
            }
            return h;
        };
        std::vector<std::pair<long, long>> batches;  // (index, count)
        for (long done = 0, bi = 0; done < trials; ++bi) {
            long this_batch = std::min(batch_size, trials - done);
            batches.emplace_back(bi, this_batch);
            done += this_batch;
        }
        long hits = 0;
        if (threads == 1 || batches.size() == 1) {
            for (auto [bi, count] : batches) hits += run_batch(bi, count);
        } else {
            for (std::size_t i = 0; i < batches.size(); i += threads) {
                std::vector<std::future<long>> futs;
                for (std::size_t k = i; k < batches.size() && k < i + threads; ++k)
                    futs.push_back(std::async(std::launch::async, run_batch, batches[k].first,
                                              batches[k].second));
                for (auto& f : futs) hits += f.get();
            }
        }
        SanovPoint pt{n, trials, hits, 0.0};
        if (hits > 0) pt.rate = -std::log(static_cast<double>(hits) / trials) / n;
        else rep.zero_hit_flag = true;
        rep.points.push_back(pt);
    }

    // least squares of -ln p_n on n over the sample sizes that produced hits
    std::vector<double> xs, ys;
    for (const auto& pt : rep.points)
        if (pt.hits > 0) {
            xs.push_back(static_cast<double>(pt.n));
            ys.push_back(pt.rate * pt.n);
        }
    if (xs.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
        }
        double denom = xs.size() * sxx - sx * sx;
        if (denom > 0.0) {
            rep.fitted_rate = (xs.size() * sxy - sx * sy) / denom;
            rep.slope_valid = true;
        }
    }
    return rep;
}

}  // namespace relent

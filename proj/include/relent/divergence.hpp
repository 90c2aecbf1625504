#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/errors.hpp"
#include "relent/tables.hpp"

namespace relent {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

// Shannon entropy of a raw probability vector, 0 ln 0 = 0.
inline double entropy_raw(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

// K(f||g) on raw vectors; +infinity when f has mass where g has none.
inline double kl_raw(const std::vector<double>& f, const std::vector<double>& g) {
    if (f.size() != g.size()) throw invalid_input("relative_entropy: length mismatch");
    double k = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (f[j] == 0.0) continue;
        if (g[j] == 0.0) return kInfinity;
        k += f[j] * std::log(f[j] / g[j]);
    }
    return k < 0.0 ? 0.0 : k;  // guard rounding on f == g
}

}  // namespace detail

// H(f) in nats; 0 <= H <= ln m.
inline double entropy(const Distribution& f) { return detail::entropy_raw(f.probs()); }

inline double entropy(const JointTable& t) { return detail::entropy_raw(t.probs()); }

inline double entropy(const ThreeWayTable& t) { return detail::entropy_raw(t.probs()); }

// Relative entropy K(f||g) in nats.  Terms with f_j = 0 contribute nothing;
// the result is +infinity exactly when f puts mass on a category g excludes.
inline double relative_entropy(const Distribution& f, const Distribution& g) {
    return detail::kl_raw(f.probs(), g.probs());
}

inline double relative_entropy(const JointTable& f, const JointTable& g) {
    if (f.rows() != g.rows() || f.cols() != g.cols())
        throw invalid_input("relative_entropy: table shape mismatch");
    return detail::kl_raw(f.probs(), g.probs());
}

inline double relative_entropy(const ThreeWayTable& f, const ThreeWayTable& g) {
    if (f.dim1() != g.dim1() || f.dim2() != g.dim2() || f.dim3() != g.dim3())
        throw invalid_input("relative_entropy: tensor shape mismatch");
    return detail::kl_raw(f.probs(), g.probs());
}

// Pearson statistic chi^2 = n sum_j (f_j - g_j)^2 / g_j.
inline double chi_square_stat(const Distribution& f, const Distribution& g, long n) {
    if (f.size() != g.size()) throw invalid_input("chi_square_stat: length mismatch");
    if (n < 1) throw invalid_input("chi_square_stat: n must be >= 1");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        double d = f[j] - g[j];
        if (g[j] == 0.0) {
            if (d == 0.0) continue;
            return kInfinity;
        }
        s += d * d / g[j];
    }
    return n * s;
}

// Aggregates f over the partition's groups: F_J = sum_{j in J} f_j.
inline Distribution coarse_grain(const Distribution& f, const Partition& p) {
    if (f.size() != p.category_count())
        throw invalid_input("coarse_grain: partition/category mismatch");
    std::vector<double> big(p.group_count(), 0.0);
    for (std::size_t j = 0; j < f.size(); ++j) big[p.group_of(j)] += f[j];
    return Distribution::from_weights(std::move(big));
}

// I(X:Y) = H(X) + H(Y) - H(X,Y), equivalently K(f || product of marginals).
inline double mutual_information(const JointTable& t) {
    double mi = entropy(t.row_marginal()) + entropy(t.col_marginal()) - entropy(t);
    return mi < 0.0 ? 0.0 : mi;
}

}  // namespace relent

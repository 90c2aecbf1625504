#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/errors.hpp"
#include "relent/tables.hpp"

namespace relent {

// Result of a maximum-likelihood projection onto a model family.
// divergence = K(fD||fitted); dim_family feeds composite-test df values.
template <typename T>
struct FitResult {
    T fitted;
    double divergence = 0.0;
    int dim_family = 0;
    int iterations = 0;
    bool converged = true;
};

// ML fit under coarse-grained specifications: within each group the data
// profile is kept and rescaled to the specified group mass,
// fitted_j = fD_j * FM_{J(j)} / FD_{J(j)}, and K(fD||fitted) = K(FD||FM).
inline FitResult<Distribution> fit_coarse_grained(const Distribution& fD, const Partition& p,
                                                  const Distribution& FM) {
    if (fD.size() != p.category_count())
        throw invalid_input("fit_coarse_grained: partition/category mismatch");
    if (static_cast<int>(FM.size()) != p.group_count())
        throw invalid_input("fit_coarse_grained: group spec length mismatch");
    Distribution FD = coarse_grain(fD, p);
    for (std::size_t J = 0; J < FM.size(); ++J)
        if (FD[J] == 0.0 && FM[J] > 0.0)
            throw invalid_input("fit_coarse_grained: group with zero data mass but "
                                "positive model mass");
    std::vector<double> w(fD.size());
    for (std::size_t j = 0; j < fD.size(); ++j) {
        int J = p.group_of(j);
        w[j] = FD[J] > 0.0 ? fD[j] * FM[J] / FD[J] : 0.0;
    }
    FitResult<Distribution> r{Distribution::from_weights(std::move(w))};
    r.divergence = relative_entropy(FD, FM);
    r.dim_family = static_cast<int>(fD.size()) - p.group_count();
    return r;
}

// ML fit of independence: the product of the observed marginals.
// The divergence is the mutual information of the table.
inline FitResult<JointTable> fit_independence(const JointTable& t) {
    Distribution rm = t.row_marginal();
    Distribution cm = t.col_marginal();
    std::vector<double> w(t.rows() * t.cols());
    for (std::size_t j = 0; j < t.rows(); ++j)
        for (std::size_t k = 0; k < t.cols(); ++k) w[j * t.cols() + k] = rm[j] * cm[k];
    FitResult<JointTable> r{JointTable::from_weights(t.rows(), t.cols(), std::move(w))};
    r.divergence = mutual_information(t);
    r.dim_family = static_cast<int>(t.rows() + t.cols()) - 2;
    return r;
}

// ML fit of symmetry on a square table: the half-sum (t + t')/2.
inline FitResult<JointTable> fit_symmetry(const JointTable& t) {
    require_square(t, "fit_symmetry");
    std::size_t m = t.rows();
    std::vector<double> w(m * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) w[j * m + k] = 0.5 * (t.at(j, k) + t.at(k, j));
    FitResult<JointTable> r{JointTable::from_weights(m, m, std::move(w))};
    r.divergence = relative_entropy(t, r.fitted);
    r.dim_family = static_cast<int>(m * (m + 1) / 2) - 1;
    return r;
}

// ML fit of quasi-symmetry (f_jk = a_j b_k c_jk with symmetric c) by
// iterative proportional fitting over the three ML conditions:
//   fitted_jk + fitted_kj = fD_jk + fD_kj,  row margins,  column margins.
// Each pass is a multiplicative rescale, so iterates stay inside the family.
// Cells whose symmetrized data mass vanishes are pinned at zero.
inline FitResult<JointTable> fit_quasi_symmetry(const JointTable& t, double tol = 1e-10,
                                                int max_iter = 10000) {
    require_square(t, "fit_quasi_symmetry");
    if (!(tol > 0.0)) throw invalid_input("fit_quasi_symmetry: tol must be > 0");
    std::size_t m = t.rows();
    Distribution rm = t.row_marginal();
    Distribution cm = t.col_marginal();

    std::vector<double> f(m * m, 1.0 / (m * m));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            if (t.at(j, k) + t.at(k, j) == 0.0) f[j * m + k] = 0.0;

    auto violation = [&]() {
        double v = 0.0;
        std::vector<double> rs(m, 0.0), cs(m, 0.0);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                rs[j] += f[j * m + k];
                cs[k] += f[j * m + k];
                double pair = f[j * m + k] + f[k * m + j];
                v = std::max(v, std::fabs(pair - (t.at(j, k) + t.at(k, j))));
            }
        for (std::size_t j = 0; j < m; ++j) {
            v = std::max(v, std::fabs(rs[j] - rm[j]));
            v = std::max(v, std::fabs(cs[j] - cm[j]));
        }
        return v;
    };

    int it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        // symmetrized pair sums
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = j; k < m; ++k) {
                double target = t.at(j, k) + t.at(k, j);
                double cur = f[j * m + k] + f[k * m + j];
                if (cur > 0.0) {
                    double s = target / cur;
                    f[j * m + k] *= s;
                    f[k * m + j] *= s;
                }
            }
        // row margins
        for (std::size_t j = 0; j < m; ++j) {
            double cur = 0.0;
            for (std::size_t k = 0; k < m; ++k) cur += f[j * m + k];
            if (cur > 0.0) {
                double s = rm[j] / cur;
                for (std::size_t k = 0; k < m; ++k) f[j * m + k] *= s;
            }
        }
        // column margins
        for (std::size_t k = 0; k < m; ++k) {
            double cur = 0.0;
            for (std::size_t j = 0; j < m; ++j) cur += f[j * m + k];
            if (cur > 0.0) {
                double s = cm[k] / cur;
                for (std::size_t j = 0; j < m; ++j) f[j * m + k] *= s;
            }
        }
        if (violation() < tol) { converged = true; ++it; break; }
    }
    if (!converged)
        throw convergence_error("fit_quasi_symmetry: IPF did not reach tolerance");

    FitResult<JointTable> r{JointTable::from_weights(m, m, std::move(f))};
    r.divergence = relative_entropy(t, r.fitted);
    // dim(QS) = (m^2 - 1) - (m-1)(m-2)/2: the saturated dimension minus the
    // quasi-symmetry residual degrees of freedom.
    r.dim_family = static_cast<int>(m * m - 1 - (m - 1) * (m - 2) / 2);
    r.iterations = it;
    r.converged = true;
    return r;
}

enum class ThreeWayModel {
    kJointIndependence,        // L: Z independent of (X,Y),   f = f_{ij.} f_{..k}
    kMarginalIndependence,     // M: Y independent of Z,       f = f(i|jk) f_{.j.} f_{..k}
    kConditionalIndependence,  // N: X independent of Z given Y, f = f_{ij.} f_{.jk} / f_{.j.}
};

// Closed-form ML fits for the three classical log-linear models on a
// three-way table, with their entropy-combination divergences.
inline FitResult<ThreeWayTable> fit_threeway(const ThreeWayTable& t, ThreeWayModel model) {
    std::size_t d1 = t.dim1(), d2 = t.dim2(), d3 = t.dim3();
    std::vector<double> xy(d1 * d2, 0.0), yz(d2 * d3, 0.0), y(d2, 0.0), z(d3, 0.0);
    for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j)
            for (std::size_t k = 0; k < d3; ++k) {
                double v = t.at(i, j, k);
                xy[i * d2 + j] += v;
                yz[j * d3 + k] += v;
                y[j] += v;
                z[k] += v;
            }
    auto h = [](const std::vector<double>& p) { return detail::entropy_raw(p); };
    double H_xyz = entropy(t), H_xy = h(xy), H_yz = h(yz), H_y = h(y), H_z = h(z);

    std::vector<double> w(d1 * d2 * d3, 0.0);
    double divergence = 0.0;
    int dim_family = 0;
    int dim_S = static_cast<int>(d1 * d2 * d3) - 1;
    switch (model) {
        case ThreeWayModel::kJointIndependence:
            for (std::size_t i = 0; i < d1; ++i)
                for (std::size_t j = 0; j < d2; ++j)
                    for (std::size_t k = 0; k < d3; ++k)
                        w[(i * d2 + j) * d3 + k] = xy[i * d2 + j] * z[k];
            divergence = H_xy + H_z - H_xyz;
            dim_family = static_cast<int>(d1 * d2 - 1 + d3 - 1);
            break;
        case ThreeWayModel::kMarginalIndependence:
            for (std::size_t i = 0; i < d1; ++i)
                for (std::size_t j = 0; j < d2; ++j)
                    for (std::size_t k = 0; k < d3; ++k) {
                        double myz = yz[j * d3 + k];
                        double v = t.at(i, j, k);
                        if (v > 0.0 && myz == 0.0)
                            throw invalid_input("fit_threeway: zero conditioning marginal");
                        if (myz > 0.0)
                            w[(i * d2 + j) * d3 + k] = v / myz * y[j] * z[k];
                        else if (y[j] * z[k] > 0.0)
                            throw invalid_input("fit_threeway: zero conditioning marginal");
                    }
            divergence = H_y + H_z - H_yz;
            dim_family = dim_S - static_cast<int>((d2 - 1) * (d3 - 1));
            break;
        case ThreeWayModel::kConditionalIndependence:
            for (std::size_t i = 0; i < d1; ++i)
                for (std::size_t j = 0; j < d2; ++j)
                    for (std::size_t k = 0; k < d3; ++k)
                        if (y[j] > 0.0)
                            w[(i * d2 + j) * d3 + k] =
                                xy[i * d2 + j] * yz[j * d3 + k] / y[j];
            divergence = H_xy + H_yz - H_xyz - H_y;
            dim_family = static_cast<int>(d1 * d2 + d2 * d3 - d2) - 1;
            break;
    }
    if (divergence < 0.0) divergence = 0.0;
    FitResult<ThreeWayTable> r{ThreeWayTable::from_weights(d1, d2, d3, std::move(w))};
    r.divergence = divergence;
    r.dim_family = dim_family;
    return r;
}

}  // namespace relent

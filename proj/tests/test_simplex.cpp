#include <doctest.h>

#include "test_util.hpp"

#include <cmath>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/divergence.hpp"
#include "relent/rng.hpp"
#include "relent/tables.hpp"

using namespace relent;

namespace {

Distribution random_distribution(Rng& rng, std::size_t m) {
    std::vector<double> w(m);
    for (double& x : w) x = 0.05 + rng.uniform();
    return Distribution::from_weights(std::move(w));
}

}  // namespace

TEST_CASE("Distribution construction rules") {
    CHECK_NOTHROW(Distribution({0.5, 0.5}));
    // totals within 1e-9 of one are renormalized
    Distribution d({0.5, 0.5 + 4e-10});
    CHECK(d[0] + d[1] == doctest::Approx(1.0).epsilon(1e-15));
    // larger deviations are data errors
    CHECK_THROWS_AS(Distribution({0.5, 0.6}), invalid_input);
    CHECK_THROWS_AS(Distribution({0.4, 0.5}), invalid_input);
    // tiny negative rounding noise is clamped, real negatives rejected
    Distribution c({1.0 + 5e-13, -5e-13});
    CHECK(c[1] == 0.0);
    CHECK_THROWS_AS(Distribution({1.01, -0.01}), invalid_input);
    CHECK_THROWS_AS(Distribution(std::vector<double>{}), invalid_input);
}

TEST_CASE("entropy special values") {
    CHECK(entropy(Distribution({1.0, 0.0, 0.0})) == 0.0);
    CHECK(entropy(Distribution::uniform(3)) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(entropy(Distribution({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("entropy bounds and permutation invariance") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        Distribution f = random_distribution(rng, 6);
        double h = entropy(f);
        CHECK(h >= 0.0);
        CHECK(h <= std::log(6.0) + 1e-12);
        std::vector<double> rev(f.probs().rbegin(), f.probs().rend());
        CHECK(entropy(Distribution(std::move(rev))) == doctest::Approx(h).epsilon(1e-13));
    }
}

TEST_CASE("relative entropy on the coin table") {
    Distribution fair({0.5, 0.5}), bent({0.7, 0.3});
    CHECK(relative_entropy(fair, fair) == 0.0);
    CHECK(relative_entropy(bent, bent) == 0.0);
    CHECK_CLOSE(relative_entropy(bent, fair), 0.0823, 5e-4);
    // K((.5,.5)||(.7,.3)) = ln5 - (ln7 + ln3)/2 = 0.087177...
    CHECK_CLOSE(relative_entropy(fair, bent), 0.0872, 5e-4);
    CHECK(relative_entropy(Distribution({1.0, 0.0}), fair) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(relative_entropy(Distribution({0.99, 0.01}), Distribution({1.0, 0.0}))));
    // f_j = 0 < g_j stays finite
    CHECK(std::isfinite(relative_entropy(Distribution({1.0, 0.0}), Distribution({0.99, 0.01}))));
    CHECK_THROWS_AS(relative_entropy(fair, Distribution({1.0, 0.0, 0.0})), invalid_input);
}

TEST_CASE("chi-square statistic on the coin table") {
    Distribution fair({0.5, 0.5}), bent({0.7, 0.3});
    CHECK(chi_square_stat(bent, fair, 1) / 2.0 == doctest::Approx(0.08).epsilon(1e-12));
    CHECK_CLOSE(chi_square_stat(fair, bent, 1) / 2.0, 0.095, 5e-4);
    CHECK(chi_square_stat(fair, fair, 100) == 0.0);
    CHECK(std::isinf(chi_square_stat(Distribution({0.99, 0.01}), Distribution({1.0, 0.0}), 1)));
    CHECK(chi_square_stat(bent, fair, 50) == doctest::Approx(50 * 0.16).epsilon(1e-12));
}

TEST_CASE("Gibbs inequality") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        Distribution f = random_distribution(rng, 5);
        Distribution g = random_distribution(rng, 5);
        CHECK(relative_entropy(f, g) >= 0.0);
    }
    Distribution f = random_distribution(rng, 5);
    CHECK(relative_entropy(f, f) <= 1e-12);
}

TEST_CASE("coarse graining") {
    Distribution f({0.2, 0.3, 0.5});
    Partition p({0, 0, 1}, 2);
    Distribution F = coarse_grain(f, p);
    CHECK(F[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(F[1] == doctest::Approx(0.5).epsilon(1e-15));

    Distribution same = coarse_grain(f, Partition::identity(3));
    for (int j = 0; j < 3; ++j) CHECK(same[j] == doctest::Approx(f[j]).epsilon(1e-15));

    CHECK_THROWS_AS(coarse_grain(f, Partition({0, 1}, 2)), invalid_input);
    CHECK_THROWS_AS(Partition({0, 0, 0}, 2), invalid_input);  // empty group
}

TEST_CASE("coarse graining contracts entropy and divergence") {
    Rng rng(23);
    for (int t = 0; t < 100; ++t) {
        std::size_t m = 4 + static_cast<std::size_t>(rng.uniform() * 5);
        Distribution f = random_distribution(rng, m);
        Distribution g = random_distribution(rng, m);
        int M = 2 + static_cast<int>(rng.uniform() * (m - 2));
        std::vector<int> assign(m);
        for (std::size_t j = 0; j < m; ++j)
            assign[j] = (j < static_cast<std::size_t>(M)) ? static_cast<int>(j)
                                                          : static_cast<int>(rng.uniform() * M);
        Partition p(assign, M);
        CHECK(entropy(coarse_grain(f, p)) <= entropy(f) + 1e-12);
        CHECK(relative_entropy(coarse_grain(f, p), coarse_grain(g, p)) <=
              relative_entropy(f, g) + 1e-12);
    }
}

TEST_CASE("chi-square matches 2K to third order") {
    Rng rng(31);
    Distribution g = random_distribution(rng, 5);
    std::vector<double> v(5);
    double vsum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        v[j] = rng.uniform() - 0.5;
        vsum += v[j];
    }
    v[4] = -vsum;  // zero-sum perturbation
    double prev_ratio = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        std::vector<double> fp(g.probs());
        for (std::size_t j = 0; j < 5; ++j) fp[j] += eps * v[j] * 0.1;
        Distribution f = Distribution::from_weights(std::move(fp));
        double gap = std::fabs(2.0 * relative_entropy(f, g) - chi_square_stat(f, g, 1));
        double ratio = gap / (eps * eps * eps);
        CHECK(ratio < 10.0);  // bounded as eps -> 0
        prev_ratio = ratio;
    }
    (void)prev_ratio;
}

TEST_CASE("joint tables and mutual information") {
    // product table: no dependence
    JointTable prod(2, 3, {0.5 * 0.2, 0.5 * 0.3, 0.5 * 0.5, 0.5 * 0.2, 0.5 * 0.3, 0.5 * 0.5});
    CHECK(mutual_information(prod) == doctest::Approx(0.0).epsilon(1e-14));

    // diagonal table: perfect dependence
    JointTable diag(3, 3, {1.0 / 3, 0, 0, 0, 1.0 / 3, 0, 0, 0, 1.0 / 3});
    CHECK(mutual_information(diag) == doctest::Approx(std::log(3.0)).epsilon(1e-14));

    // random table: I equals K(f || product of marginals)
    Rng rng(47);
    std::vector<double> w(12);
    for (double& x : w) x = 0.05 + rng.uniform();
    JointTable t = JointTable::from_weights(3, 4, std::move(w));
    Distribution rm = t.row_marginal(), cm = t.col_marginal();
    std::vector<double> pw(12);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 4; ++k) pw[j * 4 + k] = rm[j] * cm[k];
    JointTable prod2 = JointTable::from_weights(3, 4, std::move(pw));
    CHECK(mutual_information(t) ==
          doctest::Approx(relative_entropy(t, prod2)).epsilon(1e-12));
}

TEST_CASE("three-way table shape checks") {
    CHECK_THROWS_AS(ThreeWayTable(2, 2, 2, {0.5, 0.5}), invalid_input);
    std::vector<double> w(8, 0.125);
    ThreeWayTable t(2, 2, 2, w);
    CHECK(t.at(1, 1, 1) == doctest::Approx(0.125).epsilon(1e-15));
}

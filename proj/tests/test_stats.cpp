#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "greenopt/stats.hpp"

using namespace greenopt;

TEST_SUITE("stats") {

TEST_CASE("coefficient of variation is the sample std over the mean") {
    CHECK(coefficient_of_variation({1.0, 2.0, 3.0}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(coefficient_of_variation({4.0, 4.0, 4.0}) == 0.0);
    // Scale invariance.
    CHECK(coefficient_of_variation({100.0, 200.0, 300.0}) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("coefficient of variation rejects degenerate inputs") {
    CHECK_THROWS_AS(coefficient_of_variation({}), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_of_variation({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_of_variation({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_of_variation({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("magnitude bands follow the 0.01 / 0.06 / 0.14 thresholds") {
    CHECK(classify_magnitude(0.0) == Magnitude::negligible);
    CHECK(classify_magnitude(0.0099) == Magnitude::negligible);
    CHECK(classify_magnitude(0.01) == Magnitude::small);
    CHECK(classify_magnitude(0.0599) == Magnitude::small);
    CHECK(classify_magnitude(0.06) == Magnitude::medium);
    CHECK(classify_magnitude(0.139) == Magnitude::medium);
    CHECK(classify_magnitude(0.14) == Magnitude::large);
    CHECK(classify_magnitude(0.99) == Magnitude::large);
    CHECK_THROWS_AS(classify_magnitude(std::nan("")), std::invalid_argument);

    CHECK(to_string(Magnitude::negligible) == "negligible");
    CHECK(to_string(Magnitude::small) == "small");
    CHECK(to_string(Magnitude::medium) == "medium");
    CHECK(to_string(Magnitude::large) == "large");
}

TEST_CASE("cohen f transforms eta squared and back") {
    CHECK(cohen_f(0.5) == 1.0);
    CHECK(cohen_f(0.0) == 0.0);
    for (double f : {0.10, 0.25, 0.40}) {
        const double eta = f * f / (1.0 + f * f);
        CHECK(cohen_f(eta) == doctest::Approx(f).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cohen_f(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(cohen_f(1.0), std::invalid_argument);
    CHECK_THROWS_AS(cohen_f(std::nan("")), std::invalid_argument);
}

TEST_CASE("chi-square survival function matches frozen reference values") {
    CHECK(chi_square_sf(0.0, 1) == 1.0);
    CHECK(chi_square_sf(0.0, 5) == 1.0);
    // sf(x, 1) = erfc(sqrt(x/2)).
    CHECK(chi_square_sf(1.0, 1) == doctest::Approx(0.31731050786291415).epsilon(1e-12));
    // sf(x, 2) = exp(-x/2).
    CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // The 5% critical value of chi-square with one degree of freedom.
    CHECK(chi_square_sf(3.8415, 1) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK_THROWS_AS(chi_square_sf(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(chi_square_sf(-0.5, 1), std::invalid_argument);
}

TEST_CASE("kruskal-wallis on disjoint untied groups matches the closed form") {
    const auto r = kruskal_wallis({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
    CHECK(r.h_statistic == doctest::Approx(27.0 / 7.0).epsilon(1e-12));
    CHECK(r.df == 1);
    CHECK(r.p_value == doctest::Approx(chi_square_sf(27.0 / 7.0, 1)).epsilon(1e-12));
    // eta^2 = (H - k + 1) / (n - k).
    CHECK(r.eta_squared == doctest::Approx((27.0 / 7.0 - 1.0) / 4.0).epsilon(1e-12));
    CHECK(r.magnitude == Magnitude::large);
}

TEST_CASE("kruskal-wallis is order and label invariant") {
    const auto a = kruskal_wallis({{3.0, 1.0, 2.0}, {6.0, 4.0, 5.0}});
    const auto b = kruskal_wallis({{4.0, 5.0, 6.0}, {1.0, 2.0, 3.0}});
    CHECK(a.h_statistic == doctest::Approx(27.0 / 7.0).epsilon(1e-12));
    CHECK(b.h_statistic == doctest::Approx(a.h_statistic).epsilon(1e-12));
}

TEST_CASE("three perfectly separated groups") {
    const auto r = kruskal_wallis({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    CHECK(r.h_statistic == doctest::Approx(32.0 / 7.0).epsilon(1e-12));
    CHECK(r.df == 2);
    CHECK(r.eta_squared == doctest::Approx((32.0 / 7.0 - 2.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("ties are midranked and the statistic is tie-corrected") {
    // Pooled values 1,1,2,2,3,3: midranks 1.5, 3.5, 5.5; correction 1 - 18/210.
    const auto r = kruskal_wallis({{1.0, 1.0, 2.0}, {2.0, 3.0, 3.0}});
    CHECK(r.h_statistic == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value < 1.0);
}

TEST_CASE("fully tied data carries no information") {
    const auto r = kruskal_wallis({{5.0, 5.0}, {5.0, 5.0, 5.0}});
    CHECK(r.h_statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.eta_squared == 0.0);
    CHECK(r.magnitude == Magnitude::negligible);
}

TEST_CASE("kruskal-wallis validates the group structure") {
    CHECK_THROWS_AS(kruskal_wallis({}), std::invalid_argument);
    CHECK_THROWS_AS(kruskal_wallis({{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(kruskal_wallis({{1.0}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(kruskal_wallis({{1.0}, {2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(kruskal_wallis({{1.0, std::nan("")}, {2.0, 3.0}}), std::invalid_argument);
}

TEST_CASE("eta squared never drops below zero") {
    // Interleaved groups give H below its df.
    const auto r = kruskal_wallis({{1.0, 4.0, 5.0, 8.0}, {2.0, 3.0, 6.0, 7.0}});
    CHECK(r.eta_squared >= 0.0);
    CHECK(r.magnitude == Magnitude::negligible);
}

TEST_CASE("best-so-far is the running maximum, one point per round") {
    const auto curve = best_so_far({0.5, 0.4, 0.7, 0.7, 0.65});
    REQUIRE(curve.size() == 5);
    CHECK(curve[0].round == 1);
    CHECK(curve[0].best == 0.5);
    CHECK(curve[1].best == 0.5);
    CHECK(curve[2].best == 0.7);
    CHECK(curve[4].best == 0.7);
    CHECK(curve[4].round == 5);

    // Negative starts are preserved, not clamped toward zero.
    CHECK(best_so_far({-2.0, -3.0})[1].best == -2.0);
    CHECK(best_so_far({}).empty());
    CHECK_THROWS_AS(best_so_far({0.1, std::nan("")}), std::invalid_argument);
}

TEST_CASE("the optimum round is the last one that still improves past delta") {
    const auto curve = best_so_far({0.80, 0.84, 0.843, 0.844, 0.844});
    const auto opt = optimum_round(curve, 0.005);
    CHECK(opt.round == 2);
    CHECK(opt.score == 0.84);

    // With a zero threshold every strict improvement counts.
    const auto strict = optimum_round(curve, 0.0);
    CHECK(strict.round == 4);
    CHECK(strict.score == 0.844);

    // A flat curve settles immediately.
    const auto flat = optimum_round(best_so_far({0.5, 0.5, 0.5}), 0.005);
    CHECK(flat.round == 1);
    CHECK(flat.score == 0.5);

    CHECK(optimum_round(best_so_far({0.9}), 0.005).round == 1);
    CHECK_THROWS_AS(optimum_round({}, 0.005), std::invalid_argument);
    CHECK_THROWS_AS(optimum_round(curve, -0.1), std::invalid_argument);
}

}  // TEST_SUITE

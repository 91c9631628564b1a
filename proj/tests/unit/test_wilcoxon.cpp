#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "support/wilcoxon.hpp"

using mrlop::testsupport::wilcoxon_one_sided_p;

TEST_CASE("wilcoxon: uniform dominance gives the sign-test floor") {
    // All differences negative: W+ = 0, the single most extreme assignment.
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> b{2.0, 3.0, 4.0, 5.0, 6.0};
    CHECK(wilcoxon_one_sided_p(a, b) == doctest::Approx(1.0 / 32.0));

    std::vector<double> a10, b10;
    for (int i = 0; i < 10; ++i) {
        a10.push_back(i);
        b10.push_back(i + 0.5 + 0.1 * i);  // distinct magnitudes, all a < b
    }
    CHECK(wilcoxon_one_sided_p(a10, b10) == doctest::Approx(1.0 / 1024.0));
}

TEST_CASE("wilcoxon: reversed dominance is maximally insignificant") {
    std::vector<double> a{5.0, 7.0, 9.0};
    std::vector<double> b{1.0, 2.0, 3.0};
    CHECK(wilcoxon_one_sided_p(a, b) == doctest::Approx(1.0));
}

TEST_CASE("wilcoxon: mixed signs enumerate the exact null") {
    // diffs a-b = (-3, -1, 2): ranks 3, 1, 2, observed W+ = 2.
    // Null: W+ over 8 sign assignments = {0,1,2,3,3,4,5,6}; P(W+ <= 2) = 3/8.
    std::vector<double> a{0.0, 1.0, 4.0};
    std::vector<double> b{3.0, 2.0, 2.0};
    CHECK(wilcoxon_one_sided_p(a, b) == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("wilcoxon: tied magnitudes get midranks") {
    // diffs = (-1, -1, 2): midranks 1.5, 1.5, 3; observed W+ = 3.
    // Null W+ = {0, 1.5, 1.5, 3, 3, 4.5, 4.5, 6}; P(W+ <= 3) = 5/8.
    std::vector<double> a{0.0, 0.0, 5.0};
    std::vector<double> b{1.0, 1.0, 3.0};
    CHECK(wilcoxon_one_sided_p(a, b) == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("wilcoxon: zero differences are dropped before ranking") {
    std::vector<double> a{2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 7.0};
    std::vector<double> b{2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 7.0};
    // Five informative pairs remain, all negative.
    CHECK(wilcoxon_one_sided_p(a, b) == doctest::Approx(1.0 / 32.0));

    std::vector<double> same{3.0, 4.0};
    CHECK(wilcoxon_one_sided_p(same, same) == doctest::Approx(1.0));
}

TEST_CASE("wilcoxon: input validation") {
    CHECK_THROWS_AS(wilcoxon_one_sided_p({1.0}, {1.0, 2.0}), std::invalid_argument);
    std::vector<double> big_a(21), big_b(21);
    for (int i = 0; i < 21; ++i) {
        big_a[i] = i;
        big_b[i] = i + 1;
    }
    CHECK_THROWS_AS(wilcoxon_one_sided_p(big_a, big_b), std::invalid_argument);
}

TEST_CASE("wilcoxon: monotone in the strength of the effect") {
    // Weakening one pair's advantage cannot make the p-value smaller.
    std::vector<double> b{10.0, 10.0, 10.0, 10.0, 10.0, 10.0};
    std::vector<double> strong{7.0, 7.5, 8.0, 8.5, 9.0, 9.5};
    std::vector<double> weak = strong;
    weak[5] = 10.4;  // one pair flips sign with small magnitude
    double p_strong = wilcoxon_one_sided_p(strong, b);
    double p_weak = wilcoxon_one_sided_p(weak, b);
    CHECK(p_strong == doctest::Approx(1.0 / 64.0));
    CHECK(p_weak > p_strong);
}

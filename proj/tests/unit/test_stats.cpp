#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "doctest.h"
#include "natid/stats.hpp"
#include "natid/util.hpp"

using namespace natid;
using namespace natid::stats;

namespace {

struct WelchCase {
    std::vector<double> a;
    std::vector<double> b;
    double t, df, p;
};

#include "welch_cases.inc"

}  // namespace

TEST_CASE("welch t statistic, df and p match reference values") {
    for (const auto& c : kWelchCases) {
        const auto r = welch_t_test(c.a, c.b);
        CHECK(r.statistic == doctest::Approx(c.t).epsilon(1e-9));
        REQUIRE(r.df.has_value());
        CHECK(*r.df == doctest::Approx(c.df).epsilon(1e-9));
        CHECK(r.p_value == doctest::Approx(c.p).epsilon(1e-6));
    }
}

TEST_CASE("welch direction follows the larger mean") {
    const auto r = welch_t_test({5.0, 6.0, 7.0}, {1.0, 2.0, 3.0});
    CHECK(r.direction == Direction::GroupA);
    const auto r2 = welch_t_test({1.0, 2.0, 3.0}, {5.0, 6.0, 7.0});
    CHECK(r2.direction == Direction::GroupB);
}

TEST_CASE("welch degenerate zero-variance branches") {
    const auto same = welch_t_test({2.0, 2.0, 2.0}, {2.0, 2.0});
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK_FALSE(same.df.has_value());
    CHECK(same.direction == Direction::None);

    const auto apart = welch_t_test({3.0, 3.0, 3.0}, {1.0, 1.0});
    CHECK(std::isinf(apart.statistic));
    CHECK(apart.statistic > 0.0);
    CHECK(apart.p_value == 0.0);
    CHECK(apart.direction == Direction::GroupA);
}

TEST_CASE("welch rejects undersized samples") {
    CHECK_THROWS_AS(welch_t_test({1.0}, {2.0, 3.0}), InputError);
    CHECK_THROWS_AS(welch_t_test({}, {2.0, 3.0}), InputError);
}

TEST_CASE("student t cdf matches reference values") {
    for (const auto& c : kTCdfCases)
        CHECK(student_t_cdf(c[0], c[1]) == doctest::Approx(c[2]).epsilon(1e-9));
}

TEST_CASE("normal cdf matches reference values") {
    for (const auto& c : kNormalCdfCases)
        CHECK(normal_cdf(c[0]) == doctest::Approx(c[1]).epsilon(1e-9));
}

TEST_CASE("mww normal approximation matches reference p-values") {
    struct Case {
        std::vector<double> a, b;
        double u, p;
    };
    // reference U and two-sided p from an independent implementation
    // (midranks, tie correction, continuity correction)
    const std::vector<Case> cases = {
        {{3, 0, -4, -0., -2, 0, -2, 2, 2},
         {-0., 1, 3, 2, 1, 0, 1, 0, 1, 4},
         28.0,
         0.16807831903497028},
        {{1, -2, 0, -1, 3, 3, 0, -3, 2, 5},
         {2, 3, 2, 0, 0, -3, 2, 1, 1, 0},
         49.0,
         0.9693981822687799},
        {{-2, 2, -0., -0., -1, 2, 1, 3, -4, 1},
         {-1, 2, 1, 3, 2, 1, 2, 5, -1, -4, 2, 0},
         47.0,
         0.40240701147217095},
        {{-0., 3, -2, -0., -4, 3, -0., -2, -2, 0, -2},
         {5, -0., -2, -1, 0, 2, 0, -1, -1, 3, 1},
         43.0,
         0.25272342701885187},
    };
    for (const auto& c : cases) {
        const auto r = mann_whitney_u(c.a, c.b);  // na*nb > 64: normal branch
        CHECK(r.statistic == doctest::Approx(c.u).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(c.p).epsilon(1e-9));
        CHECK(mann_whitney_normal_p(c.a, c.b) == r.p_value);
    }
}

TEST_CASE("mww exact enumeration on a fully separated pair") {
    // a below b with na=1, nb=2: U=0, exact two-sided p = 2 * 1/C(3,1) = 2/3
    const auto r = mann_whitney_u({1.0}, {2.0, 3.0});
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.direction == Direction::GroupB);
}

TEST_CASE("mww is symmetric in p under swapping the samples") {
    const std::vector<double> a = {1.2, 3.4, 0.5, 2.2, 5.1};
    const std::vector<double> b = {2.0, 2.9, 4.4, 0.1, 3.3, 1.9};
    const auto r1 = mann_whitney_u(a, b);
    const auto r2 = mann_whitney_u(b, a);
    CHECK(r1.p_value == doctest::Approx(r2.p_value).epsilon(1e-12));
}

TEST_CASE("percentile cutoff keeps exactly the top tail") {
    std::unordered_map<std::string, std::int64_t> counts;
    for (int i = 1; i <= 100; ++i) counts["k" + std::to_string(i)] = i;
    const auto kept = percentile_cutoff(counts, 0.99);
    // nearest-rank: threshold is the 99th smallest count (= 99)
    CHECK(kept.size() == 2);
    const auto kept50 = percentile_cutoff(counts, 0.5);
    CHECK(kept50.size() == 51);
    CHECK_THROWS_AS(percentile_cutoff(counts, 1.0), InputError);
    CHECK_THROWS_AS(percentile_cutoff(counts, 0.0), InputError);
    counts.clear();
    CHECK_THROWS_AS(percentile_cutoff(counts, 0.5), InputError);
}

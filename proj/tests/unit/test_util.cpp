#include <set>
#include <vector>

#include "doctest.h"
#include "natid/util.hpp"

using namespace natid;

TEST_CASE("rng is deterministic per seed and differs across seeds") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
    }
    bool any_diff = false;
    Rng a2(42);
    for (int i = 0; i < 100; ++i) any_diff |= a2.next() != c.next();
    CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) and below stays under its bound") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.below(13) < 13);
    }
}

TEST_CASE("normal has roughly the requested moments") {
    Rng rng(11);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(3.0, 2.0);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
    CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("poisson matches its mean for small and large lambda") {
    Rng rng(5);
    for (const double lambda : {0.3, 4.0, 75.0}) {
        double sum = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(lambda));
        CHECK(sum / n == doctest::Approx(lambda).epsilon(0.05));
    }
    CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("shuffle is a permutation and reproducible") {
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    auto w = v;
    Rng r1(9), r2(9);
    r1.shuffle(v);
    r2.shuffle(w);
    CHECK(v == w);
    std::set<int> seen(v.begin(), v.end());
    CHECK(seen.size() == 50);
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
    CHECK(derive_seed(1, 1) == derive_seed(1, 1));
}

TEST_CASE("format_double round-trips and is minimal") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(std::stod(format_double(1e-17)) == 1e-17);
}

TEST_CASE("csv_escape quotes only when needed") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("unicode_fold lowercases ascii and accented letters") {
    CHECK(unicode_fold("Hello") == "hello");
    CHECK(unicode_fold("ESPAÑA") == "españa");
    CHECK(unicode_fold("Països Catalans") == "països catalans");
}

TEST_CASE("utf8 encode and decode round-trip") {
    const std::string s = "aé€\U0001F600";
    std::size_t i = 0;
    std::string rebuilt;
    while (i < s.size()) utf8_encode(utf8_decode(s, i), rebuilt);
    CHECK(rebuilt == s);
    CHECK(utf8_length(s) == 4);
}

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

#include "dynoclust/hungarian.hpp"
#include "helpers.hpp"

using namespace dynoclust;

namespace {

// Exhaustive minimum over all permutations (n <= 6).
double brute_perfect(const Mat& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += cost(i, perm[i]);
        best = std::min(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("hungarian solves square assignment exactly") {
    SUBCASE("identity-favoring matrix") {
        Mat c(3, 3);
        c << 0, 5, 5, 5, 0, 5, 5, 5, 0;
        const std::vector<int> a = hungarian_min_assign(c);
        CHECK(a == std::vector<int>{0, 1, 2});
    }
    SUBCASE("random matrices match brute force") {
        Rng rng(2025);
        for (int trial = 0; trial < 300; ++trial) {
            const int n = 1 + static_cast<int>(rng.uniform_int(6));
            Mat c(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) c(i, j) = rng.uniform(-3.0, 3.0);
            const std::vector<int> a = hungarian_min_assign(c);
            std::set<int> used;
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
                REQUIRE(a[i] >= 0);
                REQUIRE(a[i] < n);
                CHECK(used.insert(a[i]).second);
                v += c(i, a[i]);
            }
            CHECK(v == doctest::Approx(brute_perfect(c)).epsilon(1e-9));
        }
    }
    SUBCASE("rejects non-square input") {
        Mat c(2, 3);
        c.setZero();
        CHECK_THROWS_AS(hungarian_min_assign(c), ConfigError);
    }
}

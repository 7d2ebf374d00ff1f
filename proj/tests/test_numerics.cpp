#include <doctest.h>

#include <cmath>
#include <vector>

#include "qnet/random.hpp"
#include "qnet/special_functions.hpp"

using namespace qnet;

TEST_SUITE("special_functions") {

TEST_CASE("std_normal_cdf reference values") {
    // Frozen from an independent high-precision evaluation.
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(std_normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
    CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.9750000009035577).epsilon(1e-12));
    CHECK(std_normal_cdf(-1.959964) == doctest::Approx(0.024999999096442398).epsilon(1e-12));
    CHECK(std_normal_cdf(3.0) == doctest::Approx(0.9986501019683699).epsilon(1e-12));
    CHECK(std_normal_cdf(-3.0) == doctest::Approx(0.0013498980316300933).epsilon(1e-9));
}

TEST_CASE("std_normal_cdf symmetry and monotonicity") {
    RandomStream rng(7);
    for (int k = 0; k < 200; ++k) {
        const double x = (rng.uniform() - 0.5) * 12.0;
        CHECK(std_normal_cdf(-x) + std_normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-15));
    }
    double prev = 0.0;
    for (int k = 0; k <= 10000; ++k) {
        const double x = -8.0 + 16.0 * k / 10000.0;
        const double v = std_normal_cdf(x);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("two_sided_normal_p") {
    CHECK(two_sided_normal_p(0.0) == 1.0);
    CHECK(two_sided_normal_p(2.0) == doctest::Approx(0.04550026389635839).epsilon(1e-12));
    CHECK(two_sided_normal_p(-2.0) == two_sided_normal_p(2.0));
}

TEST_CASE("chi_square_sf closed form at k=2") {
    CHECK(chi_square_sf(0.0, 2) == 1.0);
    for (double x : {0.5, 2.0, 10.0}) {
        CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));
    }
}

TEST_CASE("chi_square_sf reference values") {
    CHECK(chi_square_sf(11.0705, 5) == doctest::Approx(0.0499999554280436).epsilon(1e-9));
    CHECK(chi_square_sf(3.2, 1) == doctest::Approx(0.07363827012030258).epsilon(1e-9));
    CHECK(chi_square_sf(7.5, 4) == doctest::Approx(0.11170929281604328).epsilon(1e-9));
}

TEST_CASE("chi_square_sf monotonicity") {
    for (int k : {1, 2, 5, 10}) {
        double prev = 1.0;
        for (int step = 0; step <= 200; ++step) {
            const double x = 0.2 * step;
            const double v = chi_square_sf(x, k);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
    for (double x : {0.5, 3.0, 12.0}) {
        double prev = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double v = chi_square_sf(x, k);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("log_gamma reference values") {
    CHECK(log_gamma(0.5) == doctest::Approx(0.5723649429247004).epsilon(1e-12));
    CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(log_gamma(2.5) == doctest::Approx(0.2846828704729196).epsilon(1e-12));
    CHECK(log_gamma(5.0) == doctest::Approx(3.178053830347945).epsilon(1e-12));
    CHECK(log_gamma(10.0) == doctest::Approx(12.801827480081467).epsilon(1e-12));
}

}  // TEST_SUITE

TEST_SUITE("random_stream") {

TEST_CASE("identical seeds give identical streams") {
    RandomStream a(12345), b(12345);
    for (int k = 0; k < 100000; ++k) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds differ") {
    RandomStream a(1), b(2);
    int equal = 0;
    for (int k = 0; k < 1000; ++k) equal += a.next_u64() == b.next_u64();
    CHECK(equal == 0);
}

TEST_CASE("uniform moments") {
    RandomStream rng(99);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int k = 0; k < n; ++k) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.004));
}

TEST_CASE("normal moments") {
    RandomStream rng(2024);
    const int n = 1'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.0).epsilon(0.004));
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("normal consumes exactly two uniforms") {
    RandomStream a(5), b(5);
    (void)a.normal();
    (void)b.uniform();
    (void)b.uniform();
    // Streams are aligned again.
    for (int k = 0; k < 100; ++k) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("bernoulli edge probabilities") {
    RandomStream rng(3);
    for (int k = 0; k < 1000; ++k) CHECK(rng.bernoulli(0.0) == 0);
    for (int k = 0; k < 1000; ++k) CHECK(rng.bernoulli(1.0) == 1);
}

TEST_CASE("derive_seed shifts the master seed") {
    CHECK(derive_seed(42, 0) == 42);
    CHECK(derive_seed(42, 3) == 45);
}

}  // TEST_SUITE

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "excursion/errors.hpp"
#include "excursion/field_models.hpp"

using namespace excursion;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;

// Standard normal upper tail at 1, from tables to 17 digits.
constexpr double kNormalTailAt1 = 0.15865525393145705;
}  // namespace

TEST_CASE("covariance model") {
    const CovarianceModel m(1.0);
    CHECK(m(0.0) == 1.0);
    double prev = 1.0;
    for (double r = 0.1; r < 10.0; r += 0.1) {
        const double c = m(r);
        CHECK(c > 0.0);
        CHECK(c < prev);
        prev = c;
    }
    CHECK(CovarianceModel(0.5).lambda() == Approx(4.0));
    CHECK_THROWS_AS(CovarianceModel(0.0), DomainError);
    CHECK_THROWS_AS(CovarianceModel(-1.0), DomainError);
}

TEST_CASE("beta_d closed values") {
    CHECK(beta_d(1) == Approx(2.0).epsilon(1e-14));
    CHECK(beta_d(2) == Approx(pi).epsilon(1e-14));
    CHECK(beta_d(3) == Approx(4.0).epsilon(1e-14));
    CHECK(bias_factor(2) == Approx(4.0 / pi).epsilon(1e-14));
    CHECK(bias_factor(3) == Approx(1.5).epsilon(1e-14));
    CHECK_THROWS_AS(beta_d(0), DomainError);
}

TEST_CASE("beta_d increasing and gamma recurrence") {
    for (int d = 1; d <= 12; ++d) {
        CHECK(beta_d(d + 1) > beta_d(d));
        // Gamma((d+2)/2) = (d/2) Gamma(d/2), so beta_{d+1} = 2 pi d / beta_d.
        CHECK(beta_d(d + 1) == Approx(2 * pi * d / beta_d(d)).epsilon(1e-12));
        const double direct = 2.0 * std::sqrt(pi) * std::tgamma((d + 2) / 2.0) / std::tgamma((d + 1) / 2.0);
        CHECK(beta_d(d + 1) == Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("gaussian surface density") {
    CHECK(gaussian_surface_density(0.0, 1.0, 2) == Approx(0.5).epsilon(1e-14));
    CHECK(gaussian_surface_density(0.0, 1.0, 3) == Approx(2.0 / pi).epsilon(1e-14));
    CHECK(gaussian_surface_density(0.0, 4.0, 2) == Approx(1.0).epsilon(1e-14));
    CHECK(gaussian_surface_density(1.3, 4.0, 3) == Approx(2.0 * gaussian_surface_density(1.3, 1.0, 3)).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_surface_density(0.0, 0.0, 2), DomainError);
    CHECK_THROWS_AS(gaussian_surface_density(0.0, -1.0, 2), DomainError);
}

TEST_CASE("gaussian volume density") {
    CHECK(gaussian_volume_density(0.0) == 0.5);
    CHECK(gaussian_volume_density(1.0) == Approx(kNormalTailAt1).epsilon(1e-14));
    CHECK(gaussian_volume_density(40.0) == 0.0);
    CHECK(gaussian_volume_density(10.0) > 0.0);  // erfc keeps the tail
    for (double u = -5.0; u <= 5.0; u += 0.25) {
        CHECK(gaussian_volume_density(u) + gaussian_volume_density(-u) == Approx(1.0).epsilon(1e-12));
        CHECK(gaussian_volume_density(u) >= gaussian_volume_density(u + 0.25));
    }
}

TEST_CASE("chi-square surface density") {
    CHECK(chisq_surface_density(2.0, 1.0, 2, 2) == Approx(std::exp(-1.0) * std::sqrt(pi)).epsilon(1e-13));
    CHECK(chisq_surface_density(2.0, 1.0, 3, 2) == Approx(std::exp(-1.0) * 4.0 / std::sqrt(pi)).epsilon(1e-13));
    CHECK(chisq_surface_density(2.0, 1.0, 2, 2) == Approx(0.652049).epsilon(1e-6));
    CHECK(chisq_surface_density(2.0, 1.0, 3, 2) == Approx(0.830215).epsilon(1e-6));
    for (int K = 1; K <= 5; ++K)
        CHECK(chisq_surface_density(1.7, 4.0, 2, K) == Approx(2.0 * chisq_surface_density(1.7, 1.0, 2, K)).epsilon(1e-14));
    CHECK_THROWS_AS(chisq_surface_density(0.0, 1.0, 2, 1), DomainError);
    CHECK_THROWS_AS(chisq_surface_density(-1.0, 1.0, 2, 1), DomainError);
}

TEST_CASE("chi-square surface density, K = 1 folded Gaussian form") {
    // For X = Z^2 the level {X = u} is {Z = sqrt u} union {Z = -sqrt u}, so its
    // surface density is twice the Gaussian one at sqrt(u).
    for (double u : {0.3, 1.0, 2.5}) {
        for (int d : {2, 3}) {
            const double folded = 2.0 * gaussian_surface_density(std::sqrt(u), 1.0, d);
            CHECK(chisq_surface_density(u, 1.0, d, 1) == Approx(folded).epsilon(1e-13));
        }
    }
}

TEST_CASE("chi-square volume density") {
    CHECK(chisq_volume_density(0.0, 3) == 1.0);
    CHECK(chisq_volume_density(-2.0, 1) == 1.0);
    CHECK(chisq_volume_density(2.0, 2) == Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(chisq_volume_density(1.0, 1) == Approx(2.0 * kNormalTailAt1).epsilon(1e-13));
    // K = 4: survival exp(-u/2)(1 + u/2).
    CHECK(chisq_volume_density(3.0, 4) == Approx(std::exp(-1.5) * 2.5).epsilon(1e-13));
}

TEST_CASE("gaussian L1 limit") {
    CHECK(gaussian_l1_limit(0.0, 1.0, 2) == Approx(2.0 / pi).epsilon(1e-14));
    CHECK(gaussian_l1_limit(0.0, 1.0, 3) == Approx(3.0 / pi).epsilon(1e-14));
    CHECK(gaussian_l1_limit(0.7, 4.0, 2) == Approx(2.0 * gaussian_l1_limit(0.7, 1.0, 2)).epsilon(1e-14));
    for (int d = 1; d <= 8; ++d)
        for (double u : {-2.0, 0.0, 0.5, 3.0})
            for (double lambda : {0.25, 1.0, 9.0}) {
                const double lhs = gaussian_l1_limit(u, lambda, d);
                const double rhs = bias_factor(d) * gaussian_surface_density(u, lambda, d);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
            }
}

TEST_CASE("long double instantiation") {
    CHECK(static_cast<double>(beta_d<long double>(2)) == Approx(pi).epsilon(1e-15));
    CHECK(static_cast<double>(gaussian_surface_density<long double>(0.0L, 1.0L, 2)) == Approx(0.5).epsilon(1e-15));
}

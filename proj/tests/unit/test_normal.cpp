#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "ipp/normal.hpp"

namespace bm = boost::math;

TEST_CASE("normal cdf agrees with boost over the real line") {
    const bm::normal ref;
    for (double z = -37.5; z <= 8.5; z += 0.0625) {
        const double expected = bm::cdf(ref, z);
        const double got = ipp::normal_cdf(z);
        CHECK(std::fabs(got - expected) <= 1e-15);
    }
    CHECK(ipp::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-16));
    CHECK(ipp::normal_cdf(-40.0) >= 0.0);
    CHECK(ipp::normal_cdf(40.0) == 1.0);
}

TEST_CASE("normal cdf relative accuracy in the lower tail") {
    // 50-digit values from mpmath.ncdf
    const double table[][2] = {
        {-37.5, 4.6053530095819548438e-308},
        {-30, 4.9067139271481870595e-198},
        {-22.5, 2.075310799066354583e-112},
        {-15, 3.6709661993127508858e-51},
        {-10, 7.619853024160526066e-24},
        {-7.5, 3.1908916729108962278e-14},
        {-5, 2.8665157187919391167e-7},
        {-3, 0.0013498980316300945267},
        {-1, 0.15865525393145705141},
        {-0.5, 0.30853753872598689636},
        {0.3, 0.61791142218895263307},
        {1.7, 0.95543453724145695634},
        {4, 0.99996832875816688008},
    };
    for (const auto& [z, p] : table) {
        CAPTURE(z);
        CHECK(std::fabs(ipp::normal_cdf(z) / p - 1.0) < 1e-15);
    }
}

TEST_CASE("normal quantile agrees with boost and inverts the cdf") {
    const bm::normal ref;
    for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 0.001, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975,
                     0.999, 1.0 - 1e-10}) {
        const double expected = bm::quantile(ref, p);
        CHECK(ipp::normal_quantile(p) == doctest::Approx(expected).epsilon(1e-14));
    }
    // lower tail only: cdf(z) rounds toward 1 for large positive z
    for (double z = -30.0; z <= 1.0; z += 0.25) {
        CHECK(ipp::normal_quantile(ipp::normal_cdf(z)) == doctest::Approx(z).epsilon(1e-12));
    }
    CHECK(std::isinf(ipp::normal_quantile(0.0)));
    CHECK(std::isinf(ipp::normal_quantile(1.0)));
    CHECK(std::isnan(ipp::normal_quantile(1.5)));
}

TEST_CASE("normal pdf") {
    const bm::normal ref;
    for (double z = -10; z <= 10; z += 0.5) {
        CHECK(ipp::normal_pdf(z) == doctest::Approx(bm::pdf(ref, z)).epsilon(1e-14));
    }
}

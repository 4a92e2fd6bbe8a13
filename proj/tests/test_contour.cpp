#include "doctest.h"

#include <cmath>

#include "slabrad/contour.hpp"

using namespace slabrad;

TEST_CASE("box geometry") {
    const SearchBox b{-1.0, 3.0, -2.0, 1.0};
    CHECK(b.width() == 4.0);
    CHECK(b.height() == 3.0);
    CHECK(b.diameter() == doctest::Approx(5.0));
    CHECK(b.center() == cplx(1.0, -0.5));
    CHECK(b.contains({0.0, 0.0}));
    CHECK_FALSE(b.contains({3.0, 0.0}));
    const SearchBox m = b.mirrored();
    CHECK(m.re_min == -3.0);
    CHECK(m.re_max == 1.0);
}

TEST_CASE("zero count of a polynomial with known roots") {
    const cplx r1{0.5, 0.5}, r2{-0.3, 0.1}, r3{2.0, 2.0};
    const Holomorphic f = [&](cplx z) { return (z - r1) * (z - r2) * (z - r2) * (z - r3); };
    CHECK(count_zeros(f, {-1.0, 1.0, -1.0, 1.0}) == 3);  // r2 is double
    CHECK(count_zeros(f, {0.0, 1.0, 0.0, 1.0}) == 1);
    CHECK(count_zeros(f, {1.5, 3.0, 1.5, 3.0}) == 1);
    CHECK(count_zeros(f, {-3.0, -2.0, -3.0, -2.0}) == 0);
}

TEST_CASE("poles count negatively") {
    const Holomorphic f = [](cplx z) { return 1.0 / (z - cplx(0.2, 0.1)); };
    CHECK(winding_number(f, {-1.0, 1.0, -1.0, 1.0}).count == -1);
}

TEST_CASE("entire function with many zeros") {
    // sin z has zeros at k pi
    const Holomorphic f = [](cplx z) { return std::sin(z); };
    CHECK(count_zeros(f, {-10.0, 10.0, -1.0, 1.0}) == 7);
}

TEST_CASE("tiny rapidly varying factor is resolved") {
    const cplx a{1.0, -1e-6};
    const Holomorphic f = [&](cplx z) { return (z - a) * std::exp(50.0 * kI * z); };
    const auto r = winding_number(f, {0.9, 1.1, -1e-3, 1e-3});
    CHECK(r.count == 1);
    CHECK(std::abs(r.raw - 1.0) < 0.05);
}

TEST_CASE("zero on the contour is refused") {
    const Holomorphic f = [](cplx z) { return z - cplx(1.0, 0.0); };
    CHECK_THROWS_AS(count_zeros(f, {1.0, 2.0, -1.0, 1.0}), CertificationFailure);
}

#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "slabrad/coupling.hpp"

using namespace slabrad;

TEST_CASE("matching factor at zero mismatch is one and matches the geometric series") {
    CHECK(std::abs(matching_factor(0.3, 0.3, 4, 0.1) - 1.0) < 1e-15);
    // (1/N) sin(N x / 2) / sin(x / 2) with x = (k - q) a, centred layers make it real
    const double k = 1.7, q = 0.4, a = 0.3;
    const int n = 5;
    const double x = (k - q) * a;
    CHECK(std::abs(matching_factor(k, q, n, a) - std::sin(n * x / 2) / (n * std::sin(x / 2))) < 1e-14);
    CHECK(std::abs(matching_factor(2.0 * kPi / 3.0, 0.0, 3, 1.0)) < 1e-15);
    CHECK_THROWS_AS(matching_factor(0.0, 0.0, 0, 1.0), InvalidParameter);
}

TEST_CASE("coupling matrix equals the direct double sum") {
    const SlabParams p = testref::params(3, 0.2, 0.05);
    const cplx w{0.9, -0.07};
    const ModeGrid grid = build_mode_grid(3);
    const CMatrix f = coupling_matrix(w, p).f;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx s = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    s += std::exp(kI * (grid.k[i] * grid.l[a] - grid.k[j] * grid.l[b]) * 1.0) *
                         std::exp(kI * w * (p.delta0 * std::abs(a - b)));
            const cplx expect = -kI * p.g / (2.0 * 3 * w) * s;
            CHECK(std::abs(f(i, j) - expect) < 1e-14);
        }
    CHECK_THROWS_AS(coupling_matrix(0.0, p), SingularFrequency);
}

TEST_CASE("layer coupling is the scaled outgoing kernel") {
    const SlabParams p = testref::params(4, 0.3, 0.1);
    const cplx w{1.1, -0.2};
    const CMatrix k = layer_kernel(w, 4, 0.3).f;
    CHECK(std::abs(k(0, 3) - std::exp(kI * w * 0.9)) < 1e-15);
    CHECK((layer_coupling(w, p).f - kernel_scale(w, p.g) * k).norm() < 1e-15);
    CHECK(std::abs(kernel_scale(w, 0.1) + kI * 0.1 / (2.0 * w)) < 1e-16);
}

TEST_CASE("k-basis coupling is a unitary rotation of the layer coupling") {
    const SlabParams p = testref::params(4, 0.25, 0.1);
    const cplx w{1.05, -0.1};
    const CMatrix u = layer_to_k_transform(4).conjugate();
    const CMatrix rotated = u * layer_coupling(w, p).f * u.adjoint();
    CHECK((rotated - coupling_matrix(w, p).f).norm() < 1e-13);
}

TEST_CASE("pair sums reproduce the phase-weighted kernel") {
    const PairSums sums(3);
    CHECK(sums.by_distance().size() == 3);
    const cplx x = std::exp(kI * cplx(0.8, -0.1));
    CMatrix total = CMatrix::Zero(3, 3);
    cplx xd = 1.0;
    for (const auto& c : sums.by_distance()) {
        total += xd * c;
        xd *= x;
    }
    // d = 0 term is N times the identity in k space
    CHECK((sums.by_distance()[0] - 3.0 * CMatrix::Identity(3, 3)).norm() < 1e-13);
    CHECK(std::abs(total(1, 1) - (3.0 + 4.0 * x + 2.0 * x * x)) < 1e-13);
}

TEST_CASE("D-matrix expansion residual is cubic in delta") {
    const SlabParams base = testref::params(3, 1.0, 1e-4);
    std::vector<double> ds, rs;
    for (double d : {1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2}) {
        SlabParams p = base;
        p.delta0 = d;
        ds.push_back(std::log(d));
        rs.push_back(std::log(d_matrix_expansion_check(1.0, p)));
    }
    const double slope = (rs.back() - rs.front()) / (ds.back() - ds.front());
    CHECK(slope == doctest::Approx(3.0).epsilon(0.03));
    CHECK_THROWS_AS(d_matrix_expansion_check(1.0, testref::params(2, 0.1, 0.1)), Unsupported);
}

TEST_CASE("D matrix at delta -> 0 couples only the k = 0 exciton") {
    const CMatrix d = d_matrix_exact(1.0, 1e-12);
    CHECK(std::abs(d(1, 1) - 9.0 * kI) < 1e-9);
    CHECK(std::abs(d(0, 0)) < 1e-9);
    CHECK(std::abs(d(0, 2)) < 1e-9);
}

TEST_CASE("descending reorder flips both axes") {
    CMatrix a(3, 3);
    a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const CMatrix r = reorder_descending(a);
    CHECK(r(0, 0) == cplx(9.0));
    CHECK(r(0, 2) == cplx(7.0));
}

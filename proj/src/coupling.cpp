#include "slabrad/coupling.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace slabrad {

namespace {

void require_nonzero(cplx omega) {
    if (omega == cplx{0.0, 0.0}) throw SingularFrequency("coupling has a 1/omega pole at omega = 0");
}

CMatrix phase_sum(const PairSums& sums, cplx x) {
    const int n = sums.n_layers();
    CMatrix out = CMatrix::Zero(n, n);
    cplx xd{1.0, 0.0};
    for (const auto& c : sums.by_distance()) {
        out += xd * c;
        xd *= x;
    }
    return out;
}

}  // namespace

cplx matching_factor(cplx k, cplx q, int n_layers, double a) {
    if (n_layers < 1) throw InvalidParameter("n_layers must be >= 1");
    cplx sum{0.0, 0.0};
    for (int j = 0; j < n_layers; ++j) {
        const double l = -0.5 * (n_layers - 1) + j;
        sum += std::exp(kI * (k - q) * (l * a));
    }
    return sum / static_cast<double>(n_layers);
}

PairSums::PairSums(int n_layers) : n_(n_layers), sums_(n_layers, CMatrix::Zero(n_layers, n_layers)) {
    const ModeGrid grid = build_mode_grid(n_layers);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) {
                    const int d = std::abs(a - b);
                    sums_[d](i, j) += std::exp(kI * (grid.k[i] * grid.l[a] - grid.k[j] * grid.l[b]));
                }
}

CouplingMatrix layer_kernel(cplx omega, int n_layers, double delta0) {
    require_nonzero(omega);
    if (n_layers < 1) throw InvalidParameter("n_layers must be >= 1");
    CMatrix k(n_layers, n_layers);
    for (int i = 0; i < n_layers; ++i)
        for (int j = 0; j < n_layers; ++j) k(i, j) = std::exp(kI * omega * (delta0 * std::abs(i - j)));
    return {omega, k, CouplingBasis::layer};
}

cplx kernel_scale(cplx omega, double g) {
    require_nonzero(omega);
    return -kI * g / (2.0 * omega);
}

CouplingMatrix layer_coupling(cplx omega, const SlabParams& params) {
    CouplingMatrix k = layer_kernel(omega, params.n_layers, params.delta0);
    k.f *= kernel_scale(omega, params.g);
    return k;
}

CouplingMatrix coupling_matrix(cplx omega, const SlabParams& params) {
    require_nonzero(omega);
    const PairSums sums(params.n_layers);
    const cplx x = std::exp(kI * omega * params.delta0);
    const cplx pref = -kI * params.g / (2.0 * params.n_layers * omega);
    return {omega, pref * phase_sum(sums, x), CouplingBasis::k};
}

CMatrix reorder_descending(const CMatrix& ascending) { return ascending.reverse(); }

CMatrix d_matrix_exact(cplx omega, double delta0) {
    const PairSums sums(3);
    const cplx x = std::exp(kI * omega * delta0);
    return kI * reorder_descending(phase_sum(sums, x));
}

CMatrix d_matrix_second_order(cplx d) {
    const cplx d2 = d * d;
    const cplx diag = 4.0 * d + 3.0 * kI * d2;
    const cplx near = d + 1.5 * kI * d2;
    const cplx far = -2.0 * d - 3.0 * kI * d2;
    const cplx centre = 9.0 * kI - 8.0 * d - 6.0 * kI * d2;
    CMatrix out(3, 3);
    out << diag, near, far, near, centre, near, far, near, diag;
    return out;
}

double d_matrix_expansion_check(cplx omega, const SlabParams& params) {
    if (params.n_layers != 3)
        throw Unsupported(fmt::format("D-matrix expansion is defined for N = 3, got N = {}", params.n_layers));
    return (d_matrix_exact(omega, params.delta0) - d_matrix_second_order(omega * params.delta0))
        .cwiseAbs()
        .maxCoeff();
}

}  // namespace slabrad

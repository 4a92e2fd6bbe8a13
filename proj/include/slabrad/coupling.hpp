// coupling.hpp: wave-vector matching factor, radiation kernel, and exciton coupling matrix F(omega)

#pragma once

#include <vector>

#include "slabrad/common.hpp"
#include "slabrad/model.hpp"

namespace slabrad {

enum class CouplingBasis { k, layer };

struct CouplingMatrix {
    cplx omega;
    CMatrix f;
    CouplingBasis basis = CouplingBasis::k;
};

/// (1/N) sum_l exp(i (k - q) l a), evaluated as the finite sum. k, q may be complex.
cplx matching_factor(cplx k, cplx q, int n_layers, double a);

/// Unscaled layer kernel K(l,l') = exp(i omega a |l - l'|) (outgoing-wave convention).
CouplingMatrix layer_kernel(cplx omega, int n_layers, double delta0);

/// Factor turning the unscaled kernel into the layer-basis coupling: -i g / (2 omega).
cplx kernel_scale(cplx omega, double g);

/// F(omega) in the layer basis, kernel_scale * K.
CouplingMatrix layer_coupling(cplx omega, const SlabParams& params);

/// F_kk'(omega) = -i g/(2 N omega) sum_{l,l'} exp(i(k l - k' l') a) exp(i omega a |l - l'|).
CouplingMatrix coupling_matrix(cplx omega, const SlabParams& params);

/// N = 3 only: exact D(omega) = i M(x), x = exp(i omega a), with F = -(i g/(6 omega)) M.
/// Rows/columns ordered m = 1, 0, -1.
CMatrix d_matrix_exact(cplx omega, double delta0);

/// Second-order expansion of D in delta (symmetric form).
CMatrix d_matrix_second_order(cplx delta);

/// Max-norm of (exact D - second-order D) at delta = omega * delta0. Throws Unsupported unless N = 3.
double d_matrix_expansion_check(cplx omega, const SlabParams& params);

/// Map between the ascending k grid (m = -1, 0, 1) and the descending D ordering (m = 1, 0, -1).
CMatrix reorder_descending(const CMatrix& ascending);

/// Precomputed layer-pair phase sums C_d(k,k') = sum_{|l-l'| = d} exp(i(k l - k' l') a),
/// so that sum_{l,l'} exp(i(k l - k' l') a) x^{|l-l'|} = sum_d x^d C_d.
class PairSums {
public:
    explicit PairSums(int n_layers);

    int n_layers() const { return n_; }
    const std::vector<CMatrix>& by_distance() const { return sums_; }

private:
    int n_;
    std::vector<CMatrix> sums_;
};

}  // namespace slabrad

// spectrum.hpp: secular function, certified complex eigenfrequencies, eigenmode weights

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slabrad/common.hpp"
#include "slabrad/contour.hpp"
#include "slabrad/coupling.hpp"
#include "slabrad/model.hpp"

namespace slabrad {

/// S(omega) = (omega^2 - 1) I - 2 omega^2 F(omega), k basis, with cached layer-pair sums.
class SecularFunction {
public:
    explicit SecularFunction(const SlabParams& params);

    const SlabParams& params() const { return params_; }
    int size() const { return params_.n_layers; }

    CMatrix matrix(cplx omega) const;
    /// dS/domega, analytic.
    CMatrix derivative(cplx omega) const;
    cplx det(cplx omega) const;
    /// d det S / d omega as a sum of row-differentiated determinants.
    cplx det_derivative(cplx omega) const;

private:
    SlabParams params_;
    PairSums sums_;
};

struct SecularMatrix {
    cplx omega;
    CMatrix s;
};

SecularMatrix secular_matrix(cplx omega, const SlabParams& params);
cplx secular_det(cplx omega, const SlabParams& params);

struct Certification {
    SearchBox box;
    int winding = 0;
    double residual = 0.0;  // |det S| / (|d det S/d omega| |omega|) at the root
    bool certified = false;
};

struct EigenMode {
    ComplexFrequency omega;
    CMatrix weights;  // N x multiplicity, orthonormal columns spanning the null space of S(omega)
    Certification cert;
    int multiplicity = 1;

    CVector weight() const { return weights.col(0); }
};

struct EigenModeSet {
    std::vector<EigenMode> modes;
    int n_expected = 0;
    bool pairing_ok = false;
    bool certified = false;

    /// Modes with Re omega > 0, ordered by decreasing decay rate.
    std::vector<const EigenMode*> positive() const;
    /// Mode with the given label, or nullptr.
    const EigenMode* find(const std::string& label) const;
    int total_multiplicity() const;
};

struct SolverOptions {
    ContourOptions contour;
    double degeneracy_tolerance = 1e-8;  // boxes narrower than this holding >1 zero become one multiple mode
    int newton_max_iterations = 60;
    int max_boxes = 20000;
};

/// Default search box around +Omega; its mirror covers -Omega.
SearchBox default_search_box(const SlabParams& params);

/// Closed-form leading-order roots (N = 1, 2, 3), both frequency signs. Uncertified.
EigenModeSet perturbative_roots(const SlabParams& params);

/// Certified zeros of det S inside one box. Every mode has Im omega < 0 or the call throws.
EigenModeSet find_modes(const SlabParams& params, const SearchBox& box, const SolverOptions& opts = {});

/// Both default boxes; checks the 2N census and the omega -> -conj(omega) pairing.
EigenModeSet find_all_modes(const SlabParams& params, const SolverOptions& opts = {});
EigenModeSet find_all_modes(const SlabParams& params, const SearchBox& box, const SolverOptions& opts = {});

/// Newton polish of a single root from a seed; returns the refined root (throws on divergence).
cplx newton_polish(const SecularFunction& sec, cplx seed, int max_iterations = 60);

/// Orthonormal basis of the numerical null space of S(omega), dimension `multiplicity`.
CMatrix null_space_weights(const SecularFunction& sec, cplx omega, int multiplicity = 1);

/// Diagonalizing transform for N = 3 (rows m = 1, 0, -1) with its normalization M.
struct TransformT {
    CMatrix t;
    cplx m;
    cplx a, b, c, e;  // elements of D: A = D11, B = D00, C = D10, E = D1,-1
};

TransformT transform_t(cplx omega, const SlabParams& params);
/// Max off-diagonal magnitude of T D T^T.
double transform_t_residual(const TransformT& t, cplx omega, const SlabParams& params);

struct LayerMode {
    std::string label;
    cplx omega;
    CMatrix layer_weights;  // mode operator sum_l w_l B_l
};

std::vector<LayerMode> eigenmode_weights_to_layer_basis(const EigenModeSet& set);

/// |<a, b>| / (|a| |b|).
double overlap(const CVector& a, const CVector& b);

}  // namespace slabrad

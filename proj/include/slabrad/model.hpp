// model.hpp: slab parameters, mode grids, and initial exciton moments
//
// Internal units: Omega = 1, c = 1. Times are in 1/Omega, lengths in c/Omega,
// so the lattice constant equals delta0 and the radiative rate eta equals g.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slabrad/common.hpp"

namespace slabrad {

/// Physical constants used only to restore units at I/O boundaries (Gaussian units).
struct PhysicalUnits {
    double omega = 0.0;  // isolated-atom frequency, rad/s
    double a = 0.0;      // lattice constant
    double d = 0.0;      // transition dipole
    double hbar = 0.0;
    double c = 0.0;
    std::optional<double> area;  // layer area A; needed for field/flux scales
};

struct SlabParams {
    int n_layers = 1;
    double delta0 = 0.0;  // Omega a / c
    double g = 0.0;       // eta / Omega
    std::optional<PhysicalUnits> physical;

    /// Throws InvalidParameter on N < 1, delta0 <= 0, g <= 0, or inconsistent physical units.
    void validate() const;
    /// Perturbative-regime warnings (delta0 or g not small); never fatal.
    std::vector<std::string> warnings() const;

    double eta() const { return g; }
    double eta_prime() const { return g * delta0 * delta0 / 4.0; }
    /// Lattice constant in c/Omega units.
    double lattice() const { return delta0; }
    /// Half thickness of the slab, (N-1)a/2.
    double half_thickness() const { return 0.5 * (n_layers - 1) * delta0; }
};

SlabParams derive_dimensionless(int n_layers, const PhysicalUnits& units);

/// Factors converting internal units back to physical ones.
struct UnitScales {
    double time = 0.0;    // 1/Omega
    double length = 0.0;  // c/Omega
    double field = 0.0;   // E0 = sqrt(2 pi eta hbar Omega / (c A))
    double flux = 0.0;    // S0 = eta hbar Omega / A
};

/// Requires params.physical with an area.
UnitScales unit_scales(const SlabParams& params);

struct ModeGrid {
    std::vector<double> m;  // -(N-1)/2 ... (N-1)/2
    std::vector<double> k;  // 2 pi m / N, in units of 1/a
    std::vector<double> l;  // layer indices, same values as m

    int size() const { return static_cast<int>(m.size()); }
};

ModeGrid build_mode_grid(int n_layers);

/// U with B_k = sum_l U(k,l) B_l, U(k,l) = exp(-i k l a)/sqrt(N).
CMatrix layer_to_k_transform(int n_layers);

/// Mean and second moments of the exciton operators, k basis.
///   normal(k,k')    = <B_k^dag B_k'>
///   anomalous(k,k') = <B_k B_k'>
struct ExcitonMoments {
    CVector mean;
    CMatrix normal;
    CMatrix anomalous;

    static ExcitonMoments vacuum(int n);

    int size() const { return static_cast<int>(mean.size()); }
    double total_excitation() const { return normal.trace().real(); }

    /// Throws UnphysicalState unless the bosonic covariance is positive semidefinite.
    void check_physical(double tol = 1e-10) const;
    /// Smallest eigenvalue of the augmented covariance matrix.
    double min_covariance_eigenvalue() const;

    /// Moments of the mirrored slab (layer l -> -l, hence k -> -k).
    ExcitonMoments mirrored() const;

    /// Moments expressed in the layer basis (inverse of the k transform).
    ExcitonMoments to_layer_basis() const;
    static ExcitonMoments from_layer_basis(const ExcitonMoments& layer);
};

enum class StateBasis { k, layer };

struct CoherentSpec {
    StateBasis basis = StateBasis::k;
    std::vector<cplx> amplitudes;
};

struct FockSpec {
    StateBasis basis = StateBasis::k;
    std::vector<int> occupations;
};

struct ChaoticSpec {
    StateBasis basis = StateBasis::k;
    std::vector<double> mean_occupations;
};

struct RawMomentsSpec {
    StateBasis basis = StateBasis::k;
    ExcitonMoments moments;
};

using StateSpec = std::variant<CoherentSpec, FockSpec, ChaoticSpec, RawMomentsSpec>;

ExcitonMoments moments_from_state_spec(const StateSpec& spec, int n_layers);

/// Coherent state alpha in the mode b with B_k = u_k b + ...; u is a normalized k-basis vector.
ExcitonMoments coherent_in_mode(const CVector& mode, cplx alpha);
/// n quanta (Fock or chaotic, identical second moments) in the mode u.
ExcitonMoments occupation_in_mode(const CVector& mode, double n);

struct ComplexFrequency {
    double re = 0.0;  // Omega_m
    double im = 0.0;  // -Gamma_m
    std::string label;

    cplx value() const { return {re, im}; }
    double gamma() const { return -im; }
};

}  // namespace slabrad

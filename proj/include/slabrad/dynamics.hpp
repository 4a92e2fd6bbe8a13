// dynamics.hpp: emitted field envelope and energy flux at a detector from certified eigenmodes

#pragma once

#include <string>
#include <vector>

#include "slabrad/common.hpp"
#include "slabrad/model.hpp"
#include "slabrad/spectrum.hpp"

namespace slabrad {

enum class DetectorSide { positive, negative };

struct DetectorSpec {
    double z = 1.0;  // distance from the slab centre, c/Omega units
    std::vector<double> times;
    DetectorSide side = DetectorSide::positive;

    /// Throws InvalidParameter if the detector sits inside the slab or times are not increasing.
    void validate(const SlabParams& params) const;
    /// Retarded time t - z/c.
    double tau(double t) const { return t - z; }
};

std::vector<double> uniform_times(double t_start, double t_end, int samples);

/// Per-mode operator coefficients: eps = sum_m (c_m . B + d_m . B^dag) exp(-i omega_m tau).
struct ModeCoefficients {
    std::string label;
    cplx omega;
    CVector c;
    CVector d;
};

/// Coefficients for the modes with Re omega > 0 (positive detector side; mirror the moments for -z).
std::vector<ModeCoefficients> mode_coefficients(const EigenModeSet& modes, const SlabParams& params);

struct ModeAmplitude {
    std::string label;
    cplx omega;
    cplx amplitude;  // c . mu + d . mu^*
};

std::vector<ModeAmplitude> mode_amplitudes(const EigenModeSet& modes, const ExcitonMoments& moments,
                                           const SlabParams& params, DetectorSide side = DetectorSide::positive);

struct FieldTrace {
    std::vector<double> times;
    std::vector<cplx> envelope;  // units of E0
    double retarded_time_origin = 0.0;
    DetectorSide side = DetectorSide::positive;
};

FieldTrace field_trace(const EigenModeSet& modes, const ExcitonMoments& moments, const DetectorSpec& detector,
                       const SlabParams& params);

enum class FluxVariant {
    rotating,  // eps^2 and eps^dag^2 dropped
    exact,
};

/// One mode pair (m <= m'). Diagonal pairs decay at 2 Gamma_m, cross pairs at Gamma_m + Gamma_m'.
struct FluxComponent {
    std::string label;  // "m|m'"
    int first = 0;
    int second = 0;
    double rate = 0.0;
    std::vector<double> values;
};

struct FluxTrace {
    std::vector<double> times;
    std::vector<double> total;  // units of S0
    std::vector<FluxComponent> components;
};

FluxTrace flux_trace(const EigenModeSet& modes, const ExcitonMoments& moments, const DetectorSpec& detector,
                     const SlabParams& params, FluxVariant variant = FluxVariant::rotating);

/// Both-sides time-integrated flux times A/(hbar Omega); equals the initial excitation number
/// up to corrections of order g and delta0^2.
double energy_bookkeeping(const EigenModeSet& modes, const ExcitonMoments& moments, const SlabParams& params);

/// Rows are the leading-order mode operators in the k basis (ascending m):
/// N = 2: B0 = (B_+ + B_-)/sqrt2, B1 = (B_+ - B_-)/sqrt2;  N = 3: B0 = B_{m=0}, B_+, B_-.
CMatrix leading_mode_basis(int n_layers);

/// Splits moments into the part diagonal in the given orthonormal mode basis (rows = modes in
/// the k basis) and the remainder. Flux is linear in (normal, anomalous), so the two parts add.
struct MomentSplit {
    ExcitonMoments diagonal;
    ExcitonMoments off_diagonal;
};
MomentSplit split_moments(const ExcitonMoments& moments, const CMatrix& mode_rows);

}  // namespace slabrad

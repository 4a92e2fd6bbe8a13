// oracle.hpp: brute-force time-domain simulator with a discretized 1D photon bath
//
// Integrates the first-moment Heisenberg equations of the full quadratic Hamiltonian
// (counter-rotating and two-photon terms included) with fixed-step RK4. Modes
// q_j = 2 pi j / L, j = +-1 .. +-j_max; coupling G(q)^2 = g N / (2 |q| L). The uniform
// (q = 0) vector-potential mode is kept as a free coordinate; without it the box
// average of E is pinned to zero and the detector sees a spurious O(1/L) offset.

#pragma once

#include <vector>

#include "slabrad/common.hpp"
#include "slabrad/model.hpp"

namespace slabrad {

struct BathConfig {
    double box_length = 400.0;  // L, c/Omega units
    double q_max = 40.0;        // UV cutoff, Omega/c units
    double dt = 1.25e-3;        // 1/Omega units
    bool two_photon = true;
    bool counter_rotating = true;
    bool taper = true;  // raised-cosine window on field synthesis from 0.7 q_max to q_max

    int j_max() const;
    int n_modes() const { return 2 * j_max(); }

    /// Throws ConfigError (with the violated bound) unless L > 2 (t_max + z), q_max >= 20, dt <= 0.05 / q_max.
    void validate(double t_max, double z) const;

    /// Smallest admissible bath for a run to t_max observed at |z| <= z_max.
    static BathConfig for_run(double t_max, double z_max, double q_max = 40.0);
};

struct OracleState {
    CVector beta;   // <B_k>, ascending k
    CVector alpha;  // <a_q>, order j = -j_max..-1, 1..j_max
    double a0 = 0.0;  // uniform mode coordinate and velocity
    double v0 = 0.0;
    double t = 0.0;
};

class OracleSimulator {
public:
    OracleSimulator(const SlabParams& params, const BathConfig& config);

    const BathConfig& config() const { return config_; }
    const SlabParams& params() const { return params_; }
    const std::vector<double>& wavenumbers() const { return q_; }

    /// Excitons with mean mu (k basis), photon vacuum.
    OracleState initial(const CVector& mu) const;
    /// Time derivative of every component (t of the result is unused).
    OracleState rhs(const OracleState& s) const;
    void step(OracleState& s) const;
    /// c-number value of the quadratic Hamiltonian (conserved by the exact flow).
    double energy(const OracleState& s) const;
    /// Field at position z in units of E0 (real).
    double field(const OracleState& s, double z) const;

    struct Run {
        std::vector<double> times;
        std::vector<double> field;
        std::vector<double> energy;
        std::vector<CVector> beta;
    };
    /// Integrates from t = 0 and records every `record_every` steps.
    Run run(const CVector& mu, double t_max, double z, int record_every) const;

private:
    SlabParams params_;
    BathConfig config_;
    std::vector<double> q_;
    Eigen::VectorXd g_;      // G(q)
    Eigen::VectorXd absq_;   // |q|
    Eigen::VectorXd fieldw_; // sqrt(|q| / (g L)) times taper
    CMatrix layer_phase_;    // N x M, exp(i q l delta0)
    CMatrix k_phase_;        // N(layers) x N(k), exp(i k l)
};

OracleState step_equations(const OracleState& state, const BathConfig& config, const SlabParams& params);

/// Field synthesized from stored states.
std::vector<double> detector_field(const std::vector<OracleState>& history, double z, const BathConfig& config,
                                   const SlabParams& params);

}  // namespace slabrad

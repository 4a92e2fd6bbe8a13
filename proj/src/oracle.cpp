#include "slabrad/oracle.hpp"

#include <cmath>

#include <fmt/format.h>

namespace slabrad {

int BathConfig::j_max() const { return static_cast<int>(std::floor(q_max * box_length / (2.0 * kPi))); }

void BathConfig::validate(double t_max, double z) const {
    if (!(box_length > 2.0 * (t_max + std::abs(z))))
        throw ConfigError(fmt::format("box_length L = {} must exceed 2 (t_max + |z|) = {} to avoid wrap-around; "
                                      "enlarge L",
                                      box_length, 2.0 * (t_max + std::abs(z))));
    if (!(q_max >= 20.0)) throw ConfigError(fmt::format("q_max = {} must be >= 20 (UV cutoff too low)", q_max));
    if (!(dt > 0.0) || dt > 0.05 / q_max * (1.0 + 1e-12))
        throw ConfigError(
            fmt::format("dt = {} must be positive and <= 0.05 / q_max = {}; reduce dt", dt, 0.05 / q_max));
    if (j_max() < 1) throw ConfigError("bath has no modes; enlarge L or q_max");
}

BathConfig BathConfig::for_run(double t_max, double z_max, double q_max) {
    BathConfig c;
    c.q_max = q_max;
    c.box_length = 2.1 * (t_max + std::abs(z_max)) + 1.0;
    c.dt = 0.05 / q_max;
    return c;
}

OracleSimulator::OracleSimulator(const SlabParams& params, const BathConfig& config)
    : params_(params), config_(config) {
    params_.validate();
    const int n = params.n_layers;
    const int jm = config.j_max();
    if (jm < 1) throw ConfigError("bath has no modes; enlarge L or q_max");
    const int m = 2 * jm;
    q_.resize(m);
    for (int j = 0; j < jm; ++j) {
        q_[j] = 2.0 * kPi * (j - jm) / config.box_length;
        q_[jm + j] = 2.0 * kPi * (j + 1) / config.box_length;
    }
    g_.resize(m);
    absq_.resize(m);
    fieldw_.resize(m);
    const double taper_start = 0.7 * config.q_max;
    for (int i = 0; i < m; ++i) {
        const double aq = std::abs(q_[i]);
        absq_(i) = aq;
        g_(i) = std::sqrt(params.g * n / (2.0 * aq * config.box_length));
        double w = 1.0;
        if (config.taper && aq > taper_start)
            w = 0.5 * (1.0 + std::cos(kPi * (aq - taper_start) / (config.q_max - taper_start)));
        fieldw_(i) = std::sqrt(aq / (params.g * config.box_length)) * w;
    }
    const ModeGrid grid = build_mode_grid(n);
    layer_phase_.resize(n, m);
    k_phase_.resize(n, n);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < m; ++i) layer_phase_(l, i) = std::exp(kI * (q_[i] * grid.l[l] * params.delta0));
        for (int k = 0; k < n; ++k) k_phase_(l, k) = std::exp(kI * (grid.k[k] * grid.l[l]));
    }
}

OracleState OracleSimulator::initial(const CVector& mu) const {
    if (mu.size() != params_.n_layers) throw InvalidParameter("initial mean has the wrong length");
    return {mu, CVector::Zero(static_cast<Eigen::Index>(q_.size())), 0.0, 0.0, 0.0};
}

OracleState OracleSimulator::rhs(const OracleState& s) const {
    const double inv_n = 1.0 / params_.n_layers;
    CVector y = s.alpha;
    CVector p = s.beta;
    if (config_.counter_rotating) {
        y += s.alpha.reverse().conjugate();
        p += s.beta.reverse().conjugate();
    }
    CVector phi = layer_phase_ * (g_.cast<cplx>().cwiseProduct(y));
    if (config_.counter_rotating) phi.array() += s.a0;
    const CVector q = k_phase_ * p;
    const CVector source = config_.two_photon ? CVector(q + 2.0 * phi) : q;
    const CVector back = layer_phase_.adjoint() * source;
    OracleState d;
    d.beta = -kI * (s.beta + inv_n * (k_phase_.adjoint() * phi));
    d.alpha = -kI * (absq_.cast<cplx>().cwiseProduct(s.alpha) + inv_n * g_.cast<cplx>().cwiseProduct(back));
    if (config_.counter_rotating) {
        d.a0 = s.v0;
        d.v0 = -(params_.g / config_.box_length) * source.real().sum();
    }
    return d;
}

namespace {

OracleState axpy(const OracleState& s, double h, const OracleState& d) {
    return {s.beta + h * d.beta, s.alpha + h * d.alpha, s.a0 + h * d.a0, s.v0 + h * d.v0, s.t};
}

}  // namespace

void OracleSimulator::step(OracleState& s) const {
    const double h = config_.dt;
    const OracleState k1 = rhs(s);
    const OracleState k2 = rhs(axpy(s, 0.5 * h, k1));
    const OracleState k3 = rhs(axpy(s, 0.5 * h, k2));
    const OracleState k4 = rhs(axpy(s, h, k3));
    s.beta += (h / 6.0) * (k1.beta + 2.0 * k2.beta + 2.0 * k3.beta + k4.beta);
    s.alpha += (h / 6.0) * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha);
    s.a0 += (h / 6.0) * (k1.a0 + 2.0 * k2.a0 + 2.0 * k3.a0 + k4.a0);
    s.v0 += (h / 6.0) * (k1.v0 + 2.0 * k2.v0 + 2.0 * k3.v0 + k4.v0);
    s.t += h;
}

double OracleSimulator::energy(const OracleState& s) const {
    const double inv_n = 1.0 / params_.n_layers;
    double e = s.beta.squaredNorm() + absq_.dot(s.alpha.cwiseAbs2());
    if (config_.counter_rotating) {
        const CVector y = s.alpha + s.alpha.reverse().conjugate();
        const CVector p = s.beta + s.beta.reverse().conjugate();
        Eigen::VectorXd phi = (layer_phase_ * (g_.cast<cplx>().cwiseProduct(y))).real();
        phi.array() += s.a0;
        const Eigen::VectorXd q = (k_phase_ * p).real();
        e += inv_n * q.dot(phi) + 0.5 * config_.box_length / (params_.g * params_.n_layers) * s.v0 * s.v0;
        if (config_.two_photon) e += inv_n * phi.squaredNorm();
    } else {
        const CVector phi = layer_phase_ * (g_.cast<cplx>().cwiseProduct(s.alpha));
        const CVector q = k_phase_ * s.beta;
        e += 2.0 * inv_n * phi.dot(q).real();
        if (config_.two_photon) e += 2.0 * inv_n * phi.squaredNorm();
    }
    return e;
}

double OracleSimulator::field(const OracleState& s, double z) const {
    const CVector zq = s.alpha - s.alpha.reverse().conjugate();
    cplx sum{0.0, 0.0};
    for (Eigen::Index i = 0; i < zq.size(); ++i) sum += fieldw_(i) * zq(i) * std::exp(kI * (q_[i] * z));
    const double uniform = -std::sqrt(2.0 / params_.n_layers) / params_.g * s.v0;
    return (kI * sum).real() + uniform;
}

OracleSimulator::Run OracleSimulator::run(const CVector& mu, double t_max, double z, int record_every) const {
    config_.validate(t_max, z);
    if (record_every < 1) throw InvalidParameter("record_every must be >= 1");
    OracleState s = initial(mu);
    Run r;
    const long steps = static_cast<long>(std::ceil(t_max / config_.dt - 1e-9));
    auto record = [&] {
        r.times.push_back(s.t);
        r.field.push_back(field(s, z));
        r.energy.push_back(energy(s));
        r.beta.push_back(s.beta);
    };
    record();
    for (long i = 1; i <= steps; ++i) {
        step(s);
        if (i % record_every == 0) record();
    }
    return r;
}

OracleState step_equations(const OracleState& state, const BathConfig& config, const SlabParams& params) {
    const OracleSimulator sim(params, config);
    if (state.alpha.size() != config.n_modes()) throw ConfigError("state does not match the bath configuration");
    OracleState next = state;
    sim.step(next);
    return next;
}

std::vector<double> detector_field(const std::vector<OracleState>& history, double z, const BathConfig& config,
                                   const SlabParams& params) {
    if (!(std::abs(z) > params.half_thickness()))
        throw InvalidParameter(fmt::format("detector at z = {} lies inside the slab", z));
    if (std::abs(z) >= 0.5 * config.box_length) throw InvalidParameter("detector lies outside the bath box");
    const OracleSimulator sim(params, config);
    std::vector<double> out;
    out.reserve(history.size());
    for (const auto& s : history) out.push_back(sim.field(s, z));
    return out;
}

}  // namespace slabrad

#include "slabrad/dynamics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace slabrad {

void DetectorSpec::validate(const SlabParams& params) const {
    if (!std::isfinite(z) || !(z > params.half_thickness()))
        throw InvalidParameter(fmt::format("detector at z = {} lies inside the slab (half thickness {})", z,
                                           params.half_thickness()));
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw InvalidParameter("detector times must be strictly increasing");
}

std::vector<double> uniform_times(double t_start, double t_end, int samples) {
    if (samples < 2 || !(t_end > t_start)) throw InvalidParameter("need t_end > t_start and at least 2 samples");
    std::vector<double> t(samples);
    const double h = (t_end - t_start) / (samples - 1);
    for (int i = 0; i < samples; ++i) t[i] = t_start + h * i;
    return t;
}

std::vector<ModeCoefficients> mode_coefficients(const EigenModeSet& modes, const SlabParams& params) {
    const int n = params.n_layers;
    const ModeGrid grid = build_mode_grid(n);
    const SecularFunction sec(params);
    const double norm = std::sqrt(0.5 * n);
    std::vector<ModeCoefficients> out;
    for (const EigenMode* mode : modes.positive()) {
        const cplx w = mode->omega.value();
        CVector a(n);
        for (int i = 0; i < n; ++i) a(i) = matching_factor(grid.k[i] / params.delta0, w, n, params.delta0);
        // Residue of S^{-1} at a simple (or semisimple) root of the symmetric S.
        const CMatrix& v = mode->weights;
        const CMatrix proj = v.transpose() * sec.derivative(w) * v;
        const CMatrix residue = v * proj.inverse() * v.transpose();
        const CVector r = norm * (a.transpose() * residue).transpose();
        ModeCoefficients mc;
        mc.label = mode->omega.label;
        mc.omega = w;
        mc.c = (w + 1.0) * r;
        mc.d = (w - 1.0) * r.reverse();
        out.push_back(std::move(mc));
    }
    return out;
}

namespace {

const ExcitonMoments& for_side(const ExcitonMoments& m, DetectorSide side, ExcitonMoments& scratch) {
    if (side == DetectorSide::positive) return m;
    scratch = m.mirrored();
    return scratch;
}

// <eps_i^dag eps_j>, normally ordered in B.
CMatrix pair_weights(const std::vector<ModeCoefficients>& mc, const ExcitonMoments& mom) {
    const int k = static_cast<int>(mc.size());
    CMatrix p(k, k);
    const CMatrix& n = mom.normal;
    const CMatrix& m = mom.anomalous;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const auto& a = mc[i];
            const auto& b = mc[j];
            p(i, j) = a.c.dot(n * b.c) + a.c.dot(m.conjugate() * b.d) + a.d.dot(m * b.c) +
                      a.d.dot(n.transpose() * b.d);
        }
    return p;
}

// <eps_i eps_j>, normally ordered in B.
CMatrix pair_weights_anomalous(const std::vector<ModeCoefficients>& mc, const ExcitonMoments& mom) {
    const int k = static_cast<int>(mc.size());
    CMatrix q(k, k);
    const CMatrix& n = mom.normal;
    const CMatrix& m = mom.anomalous;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const auto& a = mc[i];
            const auto& b = mc[j];
            q(i, j) = (a.c.transpose() * m * b.c)(0, 0) + (a.c.transpose() * n.transpose() * b.d)(0, 0) +
                      (a.d.transpose() * n * b.c)(0, 0) + (a.d.transpose() * m.conjugate() * b.d)(0, 0);
        }
    return q;
}

}  // namespace

std::vector<ModeAmplitude> mode_amplitudes(const EigenModeSet& modes, const ExcitonMoments& moments,
                                           const SlabParams& params, DetectorSide side) {
    ExcitonMoments scratch;
    const ExcitonMoments& mom = for_side(moments, side, scratch);
    if (mom.size() != params.n_layers) throw InvalidParameter("moment size does not match n_layers");
    std::vector<ModeAmplitude> out;
    for (const auto& mc : mode_coefficients(modes, params)) {
        const cplx amp = (mc.c.transpose() * mom.mean)(0, 0) + (mc.d.transpose() * mom.mean.conjugate())(0, 0);
        out.push_back({mc.label, mc.omega, amp});
    }
    return out;
}

FieldTrace field_trace(const EigenModeSet& modes, const ExcitonMoments& moments, const DetectorSpec& detector,
                       const SlabParams& params) {
    detector.validate(params);
    const auto amps = mode_amplitudes(modes, moments, params, detector.side);
    FieldTrace tr;
    tr.times = detector.times;
    tr.retarded_time_origin = detector.z;
    tr.side = detector.side;
    tr.envelope.reserve(detector.times.size());
    for (double t : detector.times) {
        const double tau = detector.tau(t);
        cplx e{0.0, 0.0};
        if (tau >= 0.0)
            for (const auto& a : amps) e += a.amplitude * std::exp(-kI * a.omega * tau);
        tr.envelope.push_back(e);
    }
    return tr;
}

FluxTrace flux_trace(const EigenModeSet& modes, const ExcitonMoments& moments, const DetectorSpec& detector,
                     const SlabParams& params, FluxVariant variant) {
    detector.validate(params);
    if (moments.size() != params.n_layers) throw InvalidParameter("moment size does not match n_layers");
    ExcitonMoments scratch;
    const ExcitonMoments& mom = for_side(moments, detector.side, scratch);
    const auto mc = mode_coefficients(modes, params);
    const CMatrix p = pair_weights(mc, mom);
    const int k = static_cast<int>(mc.size());

    FluxTrace tr;
    tr.times = detector.times;
    tr.total.assign(tr.times.size(), 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            FluxComponent comp;
            comp.label = fmt::format("{}|{}", mc[i].label, mc[j].label);
            comp.first = i;
            comp.second = j;
            comp.rate = -(mc[i].omega.imag() + mc[j].omega.imag());
            const cplx s = kI * (std::conj(mc[i].omega) - mc[j].omega);
            comp.values.reserve(tr.times.size());
            for (std::size_t t = 0; t < tr.times.size(); ++t) {
                const double tau = detector.tau(tr.times[t]);
                double v = 0.0;
                if (tau >= 0.0) {
                    const cplx e = p(i, j) * std::exp(s * tau);
                    v = i == j ? e.real() : 2.0 * e.real();
                }
                comp.values.push_back(v);
                tr.total[t] += v;
            }
            tr.components.push_back(std::move(comp));
        }

    if (variant == FluxVariant::exact) {
        const CMatrix q = pair_weights_anomalous(mc, mom);
        FluxComponent osc;
        osc.label = "oscillating";
        osc.first = -1;
        osc.second = -1;
        for (std::size_t t = 0; t < tr.times.size(); ++t) {
            const double tau = detector.tau(tr.times[t]);
            cplx e{0.0, 0.0};
            if (tau >= 0.0)
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) e += q(i, j) * std::exp(-kI * (mc[i].omega + mc[j].omega) * tau);
            osc.values.push_back(e.real());
            tr.total[t] += e.real();
        }
        tr.components.push_back(std::move(osc));
    }
    return tr;
}

double energy_bookkeeping(const EigenModeSet& modes, const ExcitonMoments& moments, const SlabParams& params) {
    if (moments.size() != params.n_layers) throw InvalidParameter("moment size does not match n_layers");
    const auto mc = mode_coefficients(modes, params);
    const int k = static_cast<int>(mc.size());
    double total = 0.0;
    for (const ExcitonMoments& mom : {moments, moments.mirrored()}) {
        const CMatrix p = pair_weights(mc, mom);
        cplx integral{0.0, 0.0};
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) integral += p(i, j) * kI / (std::conj(mc[i].omega) - mc[j].omega);
        total += integral.real();
    }
    return params.g * total;
}

CMatrix leading_mode_basis(int n_layers) {
    const double r = 1.0 / std::sqrt(2.0);
    CMatrix w;
    switch (n_layers) {
    case 1:
        w = CMatrix::Identity(1, 1);
        break;
    case 2:
        w.resize(2, 2);
        w << r, r, -r, r;
        break;
    case 3:
        w.resize(3, 3);
        w << 0.0, 1.0, 0.0, r, 0.0, r, -r, 0.0, r;
        break;
    default:
        throw Unsupported(fmt::format("leading-order mode basis is tabulated for N <= 3, got N = {}", n_layers));
    }
    return w;
}

MomentSplit split_moments(const ExcitonMoments& moments, const CMatrix& mode_rows) {
    const CMatrix& w = mode_rows;
    const CMatrix nb = w.conjugate() * moments.normal * w.transpose();
    const CMatrix nb_diag = nb.diagonal().asDiagonal();
    const CMatrix to_k_normal = w.transpose() * nb_diag * w.conjugate();
    MomentSplit s;
    s.diagonal = ExcitonMoments::vacuum(moments.size());
    s.diagonal.normal = to_k_normal;
    s.off_diagonal = moments;
    s.off_diagonal.normal = moments.normal - to_k_normal;
    return s;
}

}  // namespace slabrad

#include "slabrad/model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace slabrad {

void SlabParams::validate() const {
    if (n_layers < 1) throw InvalidParameter(fmt::format("n_layers must be >= 1, got {}", n_layers));
    if (!(delta0 > 0.0) || !std::isfinite(delta0))
        throw InvalidParameter(fmt::format("delta0 must be > 0, got {}", delta0));
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidParameter(fmt::format("g must be > 0, got {}", g));
    if (physical) {
        const auto& u = *physical;
        const double g_phys = 4.0 * kPi * u.d * u.d / (u.hbar * u.a * u.a * u.c);
        if (std::abs(g_phys - g) > 1e-12 * std::abs(g))
            throw InvalidParameter(fmt::format("g = {} inconsistent with physical units (4 pi d^2/(hbar a^2 c) = {})", g,
                                               g_phys));
        const double d_phys = u.omega * u.a / u.c;
        if (std::abs(d_phys - delta0) > 1e-12 * std::abs(delta0))
            throw InvalidParameter(
                fmt::format("delta0 = {} inconsistent with physical units (Omega a/c = {})", delta0, d_phys));
    }
}

std::vector<std::string> SlabParams::warnings() const {
    std::vector<std::string> out;
    if (delta0 > 0.1) out.push_back(fmt::format("delta0 = {} is not small; closed-form rates lose accuracy", delta0));
    if (g > 1e-2) out.push_back(fmt::format("g = {} is not small; closed-form rates lose accuracy", g));
    return out;
}

SlabParams derive_dimensionless(int n_layers, const PhysicalUnits& units) {
    if (!(units.omega > 0.0) || !(units.a > 0.0) || !(units.d > 0.0) || !(units.hbar > 0.0) || !(units.c > 0.0))
        throw InvalidParameter("physical units must all be positive (omega, a, d, hbar, c)");
    if (units.area && !(*units.area > 0.0)) throw InvalidParameter("layer area must be positive");
    SlabParams p;
    p.n_layers = n_layers;
    p.delta0 = units.omega * units.a / units.c;
    p.g = 4.0 * kPi * units.d * units.d / (units.hbar * units.a * units.a * units.c);
    p.physical = units;
    p.validate();
    return p;
}

UnitScales unit_scales(const SlabParams& params) {
    if (!params.physical || !params.physical->area)
        throw InvalidParameter("unit restoration needs physical units including the layer area");
    const auto& u = *params.physical;
    const double eta = params.g * u.omega;
    UnitScales s;
    s.time = 1.0 / u.omega;
    s.length = u.c / u.omega;
    s.field = std::sqrt(2.0 * kPi * eta * u.hbar * u.omega / (u.c * *u.area));
    s.flux = eta * u.hbar * u.omega / *u.area;
    return s;
}

ModeGrid build_mode_grid(int n_layers) {
    if (n_layers < 1) throw InvalidParameter(fmt::format("n_layers must be >= 1, got {}", n_layers));
    ModeGrid grid;
    for (int j = 0; j < n_layers; ++j) {
        const double m = -0.5 * (n_layers - 1) + j;
        grid.m.push_back(m);
        grid.k.push_back(2.0 * kPi * m / n_layers);
        grid.l.push_back(m);
    }
    return grid;
}

CMatrix layer_to_k_transform(int n_layers) {
    const ModeGrid grid = build_mode_grid(n_layers);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_layers));
    CMatrix u(n_layers, n_layers);
    for (int i = 0; i < n_layers; ++i)
        for (int j = 0; j < n_layers; ++j) u(i, j) = norm * std::exp(-kI * (grid.k[i] * grid.l[j]));
    return u;
}

ExcitonMoments ExcitonMoments::vacuum(int n) {
    return {CVector::Zero(n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
}

double ExcitonMoments::min_covariance_eigenvalue() const {
    const int n = size();
    CMatrix cov(2 * n, 2 * n);
    cov.topLeftCorner(n, n) = CMatrix::Identity(n, n) + normal.transpose();
    cov.topRightCorner(n, n) = anomalous;
    cov.bottomLeftCorner(n, n) = anomalous.conjugate();
    cov.bottomRightCorner(n, n) = normal;
    CVector xi(2 * n);
    xi << mean, mean.conjugate();
    cov -= xi * xi.adjoint();
    const CMatrix herm = 0.5 * (cov + cov.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void ExcitonMoments::check_physical(double tol) const {
    const int n = size();
    if (normal.rows() != n || normal.cols() != n || anomalous.rows() != n || anomalous.cols() != n)
        throw UnphysicalState("moment dimensions disagree");
    const double scale = 1.0 + normal.cwiseAbs().maxCoeff() + anomalous.cwiseAbs().maxCoeff() +
                         (n > 0 ? mean.squaredNorm() : 0.0);
    if ((normal - normal.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw UnphysicalState("normal moments are not Hermitian");
    if ((anomalous - anomalous.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw UnphysicalState("anomalous moments are not symmetric");
    const double lam = min_covariance_eigenvalue();
    if (lam < -tol * scale)
        throw UnphysicalState(fmt::format("bosonic covariance not positive semidefinite (min eigenvalue {:.3e})", lam));
}

ExcitonMoments ExcitonMoments::mirrored() const {
    ExcitonMoments out = *this;
    out.mean = mean.reverse();
    out.normal = normal.reverse();
    out.anomalous = anomalous.reverse();
    return out;
}

ExcitonMoments ExcitonMoments::to_layer_basis() const {
    const CMatrix u = layer_to_k_transform(size());
    return {u.adjoint() * mean, u.transpose() * normal * u.conjugate(), u.adjoint() * anomalous * u.conjugate()};
}

ExcitonMoments ExcitonMoments::from_layer_basis(const ExcitonMoments& layer) {
    const CMatrix u = layer_to_k_transform(layer.size());
    return {u * layer.mean, u.conjugate() * layer.normal * u.transpose(), u * layer.anomalous * u.transpose()};
}

namespace {

void require_length(std::size_t got, int n, const char* what) {
    if (static_cast<int>(got) != n)
        throw InvalidParameter(fmt::format("{} needs {} entries, got {}", what, n, got));
}

ExcitonMoments in_basis(ExcitonMoments m, StateBasis basis) {
    return basis == StateBasis::layer ? ExcitonMoments::from_layer_basis(m) : m;
}

}  // namespace

ExcitonMoments moments_from_state_spec(const StateSpec& spec, int n_layers) {
    ExcitonMoments out = ExcitonMoments::vacuum(n_layers);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>) {
                require_length(s.amplitudes.size(), n_layers, "coherent amplitudes");
                ExcitonMoments m = ExcitonMoments::vacuum(n_layers);
                for (int i = 0; i < n_layers; ++i) m.mean(i) = s.amplitudes[i];
                m.normal = m.mean.conjugate() * m.mean.transpose();
                m.anomalous = m.mean * m.mean.transpose();
                out = in_basis(m, s.basis);
            } else if constexpr (std::is_same_v<T, FockSpec>) {
                require_length(s.occupations.size(), n_layers, "fock occupations");
                ExcitonMoments m = ExcitonMoments::vacuum(n_layers);
                for (int i = 0; i < n_layers; ++i) {
                    if (s.occupations[i] < 0) throw UnphysicalState("fock occupations must be nonnegative");
                    m.normal(i, i) = s.occupations[i];
                }
                out = in_basis(m, s.basis);
            } else if constexpr (std::is_same_v<T, ChaoticSpec>) {
                require_length(s.mean_occupations.size(), n_layers, "chaotic mean occupations");
                ExcitonMoments m = ExcitonMoments::vacuum(n_layers);
                for (int i = 0; i < n_layers; ++i) {
                    if (!(s.mean_occupations[i] >= 0.0))
                        throw UnphysicalState("chaotic mean occupations must be nonnegative");
                    m.normal(i, i) = s.mean_occupations[i];
                }
                out = in_basis(m, s.basis);
            } else {
                if (s.moments.size() != n_layers)
                    throw InvalidParameter(
                        fmt::format("raw moments have dimension {}, expected {}", s.moments.size(), n_layers));
                out = in_basis(s.moments, s.basis);
            }
        },
        spec);
    out.check_physical();
    return out;
}

ExcitonMoments coherent_in_mode(const CVector& mode, cplx alpha) {
    ExcitonMoments m = ExcitonMoments::vacuum(static_cast<int>(mode.size()));
    m.mean = alpha * mode.normalized();
    m.normal = m.mean.conjugate() * m.mean.transpose();
    m.anomalous = m.mean * m.mean.transpose();
    return m;
}

ExcitonMoments occupation_in_mode(const CVector& mode, double n) {
    ExcitonMoments m = ExcitonMoments::vacuum(static_cast<int>(mode.size()));
    const CVector u = mode.normalized();
    m.normal = n * u.conjugate() * u.transpose();
    return m;
}

}  // namespace slabrad

#include "slabrad/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace slabrad {

SecularFunction::SecularFunction(const SlabParams& params) : params_(params), sums_(params.n_layers) {
    if (params.n_layers < 1) throw InvalidParameter("n_layers must be >= 1");
}

CMatrix SecularFunction::matrix(cplx omega) const {
    if (omega == cplx{0.0, 0.0}) throw SingularFrequency("secular matrix undefined at omega = 0");
    const int n = size();
    const cplx x = std::exp(kI * omega * params_.delta0);
    CMatrix s = CMatrix::Zero(n, n);
    cplx xd{1.0, 0.0};
    for (const auto& c : sums_.by_distance()) {
        s += xd * c;
        xd *= x;
    }
    s *= kI * params_.g * omega / static_cast<double>(n);
    s.diagonal().array() += (omega - 1.0) * (omega + 1.0);
    return s;
}

CMatrix SecularFunction::derivative(cplx omega) const {
    if (omega == cplx{0.0, 0.0}) throw SingularFrequency("secular matrix undefined at omega = 0");
    const int n = size();
    const cplx x = std::exp(kI * omega * params_.delta0);
    CMatrix ds = CMatrix::Zero(n, n);
    cplx xd{1.0, 0.0};
    int d = 0;
    for (const auto& c : sums_.by_distance()) {
        ds += (1.0 + kI * omega * (params_.delta0 * d)) * xd * c;
        xd *= x;
        ++d;
    }
    ds *= kI * params_.g / static_cast<double>(n);
    ds.diagonal().array() += 2.0 * omega;
    return ds;
}

cplx SecularFunction::det(cplx omega) const {
    const CMatrix s = matrix(omega);
    if (size() == 1) return s(0, 0);
    return s.partialPivLu().determinant();
}

cplx SecularFunction::det_derivative(cplx omega) const {
    const CMatrix s = matrix(omega);
    const CMatrix ds = derivative(omega);
    if (size() == 1) return ds(0, 0);
    cplx total{0.0, 0.0};
    for (int i = 0; i < size(); ++i) {
        CMatrix si = s;
        si.row(i) = ds.row(i);
        total += si.partialPivLu().determinant();
    }
    return total;
}

SecularMatrix secular_matrix(cplx omega, const SlabParams& params) {
    return {omega, SecularFunction(params).matrix(omega)};
}

cplx secular_det(cplx omega, const SlabParams& params) { return SecularFunction(params).det(omega); }

std::vector<const EigenMode*> EigenModeSet::positive() const {
    std::vector<const EigenMode*> out;
    for (const auto& m : modes)
        if (m.omega.re > 0.0) out.push_back(&m);
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->omega.gamma() > b->omega.gamma(); });
    return out;
}

const EigenMode* EigenModeSet::find(const std::string& label) const {
    for (const auto& m : modes)
        if (m.omega.label == label) return &m;
    return nullptr;
}

int EigenModeSet::total_multiplicity() const {
    int total = 0;
    for (const auto& m : modes) total += m.multiplicity;
    return total;
}

SearchBox default_search_box(const SlabParams& params) {
    const double half = std::min(20.0 * params.g + 5.0 * params.g * params.delta0, 0.5);
    const double depth = std::min(20.0 * params.g * params.n_layers, 0.9);
    return {1.0 - half, 1.0 + half, -depth, 2.0 * params.g};
}

namespace {

CVector unit(int n, std::initializer_list<std::pair<int, double>> entries) {
    CVector v = CVector::Zero(n);
    for (auto [i, x] : entries) v(i) = x;
    return v.normalized();
}

void add_pair(EigenModeSet& set, double re, double gamma, const CVector& w, const std::string& label) {
    EigenMode pos;
    pos.omega = {re, -gamma, label};
    pos.weights = w;
    EigenMode neg;
    neg.omega = {-re, -gamma, label + "'"};
    neg.weights = w.conjugate();
    set.modes.push_back(pos);
    set.modes.push_back(neg);
}

CVector phase_normalized(CVector v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (std::abs(v(imax)) > 0.0) v *= std::conj(v(imax)) / std::abs(v(imax));
    return v;
}

void label_half(std::vector<EigenMode*> half, int n, const std::string& suffix) {
    std::sort(half.begin(), half.end(), [](auto* a, auto* b) { return a->omega.gamma() > b->omega.gamma(); });
    for (std::size_t i = 0; i < half.size(); ++i) {
        EigenMode& m = *half[i];
        std::string label = fmt::format("s{}", i);
        if (n == 1 && half.size() == 1) {
            label = "0";
        } else if (n == 2 && half.size() == 2) {
            label = i == 0 ? "1" : "2";
        } else if (n == 3 && half.size() == 3 && m.multiplicity == 1) {
            if (i == 0) {
                label = "0";
            } else {
                const CVector v = m.weight();
                label = std::abs(v(0) - v(2)) < std::abs(v(0) + v(2)) ? "1" : "-1";
            }
        }
        m.omega.label = label + suffix;
    }
}

void label_modes(EigenModeSet& set, int n) {
    std::vector<EigenMode*> pos, neg;
    for (auto& m : set.modes) (m.omega.re > 0.0 ? pos : neg).push_back(&m);
    label_half(pos, n, "");
    label_half(neg, n, "'");
}

std::optional<cplx> try_newton(const SecularFunction& sec, cplx seed, int max_iterations) {
    cplx w = seed;
    cplx fw = sec.det(w);
    for (int it = 0; it < max_iterations; ++it) {
        const cplx dfw = sec.det_derivative(w);
        if (dfw == cplx{0.0, 0.0} || !std::isfinite(std::abs(dfw))) return std::nullopt;
        cplx step = fw / dfw;
        if (!std::isfinite(std::abs(step))) return std::nullopt;
        cplx next = w - step;
        cplx fnext = next == cplx{0.0, 0.0} ? cplx{1e300, 0.0} : sec.det(next);
        int halvings = 0;
        while (std::abs(fnext) > std::abs(fw) && halvings < 12 && std::abs(step) > 1e-15 * std::abs(w)) {
            step *= 0.5;
            next = w - step;
            fnext = sec.det(next);
            ++halvings;
        }
        const bool done = std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w));
        if (std::abs(fnext) <= std::abs(fw) || done) {
            w = next;
            fw = fnext;
        }
        if (done || fw == cplx{0.0, 0.0}) return w;
        if (halvings == 12) return std::abs(step) < 1e-12 * std::max(1.0, std::abs(w)) ? std::optional<cplx>(w)
                                                                                         : std::nullopt;
    }
    return std::nullopt;
}

struct Isolator {
    const SecularFunction& sec;
    const SolverOptions& opts;
    Holomorphic f;
    std::vector<EigenMode> found;
    int boxes = 0;

    void record(cplx root, const SearchBox& box, int count) {
        EigenMode m;
        m.omega = {root.real(), root.imag(), ""};
        m.multiplicity = count;
        m.weights = null_space_weights(sec, root, count);
        m.cert.box = box;
        m.cert.winding = count;
        const cplx df = sec.det_derivative(root);
        const double denom = std::abs(df) * std::abs(root);
        m.cert.residual = denom > 0.0 ? std::abs(sec.det(root)) / denom : 0.0;
        m.cert.certified = true;
        found.push_back(m);
    }

    void run(const SearchBox& box, int count) {
        if (count == 0) return;
        if (++boxes > opts.max_boxes) throw CertificationFailure("root isolation exceeded its box budget");
        if (count == 1) {
            if (auto r = try_newton(sec, box.center(), opts.newton_max_iterations); r && box.contains(*r)) {
                record(*r, box, 1);
                return;
            }
            if (box.diameter() < 1e-14 * std::max(1.0, std::abs(box.center()))) {
                record(box.center(), box, 1);
                return;
            }
        } else if (box.diameter() < opts.degeneracy_tolerance) {
            auto r = try_newton(sec, box.center(), opts.newton_max_iterations);
            record(r && box.contains(*r) ? *r : box.center(), box, count);
            return;
        }
        split(box, count);
    }

    void split(const SearchBox& box, int count) {
        const bool along_re = box.width() >= box.height();
        for (double frac : {0.5123, 0.4629, 0.5377, 0.4181}) {
            SearchBox lo = box, hi = box;
            if (along_re) {
                const double cut = box.re_min + frac * box.width();
                lo.re_max = cut;
                hi.re_min = cut;
            } else {
                const double cut = box.im_min + frac * box.height();
                lo.im_max = cut;
                hi.im_min = cut;
            }
            int clo = 0, chi = 0;
            try {
                clo = count_zeros(f, lo, opts.contour);
                chi = count_zeros(f, hi, opts.contour);
            } catch (const CertificationFailure&) {
                continue;
            }
            if (clo + chi != count) continue;
            run(lo, clo);
            run(hi, chi);
            return;
        }
        throw CertificationFailure(fmt::format("could not split box [{}, {}] x [{}, {}] holding {} zeros", box.re_min,
                                               box.re_max, box.im_min, box.im_max, count));
    }
};

}  // namespace

EigenModeSet perturbative_roots(const SlabParams& params) {
    params.validate();
    const double g = params.g;
    const double d = params.delta0;
    EigenModeSet set;
    set.n_expected = 2 * params.n_layers;
    switch (params.n_layers) {
    case 1:
        add_pair(set, std::sqrt(1.0 - 0.25 * g * g), 0.5 * g, unit(1, {{0, 1.0}}), "0");
        break;
    case 2:
        add_pair(set, 1.0 - 0.5 * g * g + 0.5 * g * d, g, unit(2, {{0, 1.0}, {1, 1.0}}), "1");
        add_pair(set, 1.0 - 0.5 * g * d, 0.25 * g * d * d, unit(2, {{0, -1.0}, {1, 1.0}}), "2");
        break;
    case 3:
        add_pair(set, 1.0 - 9.0 * g * g / 8.0 + 4.0 * g * d / 3.0, 1.5 * g, unit(3, {{1, 1.0}}), "0");
        add_pair(set, 1.0 - g * d / 3.0, g * d * d / 27.0, unit(3, {{0, 1.0}, {2, 1.0}}), "1");
        add_pair(set, 1.0 - g * d, g * d * d, unit(3, {{0, -1.0}, {2, 1.0}}), "-1");
        break;
    default:
        throw Unsupported(fmt::format("closed-form roots exist for N <= 3, got N = {}", params.n_layers));
    }
    return set;
}

cplx newton_polish(const SecularFunction& sec, cplx seed, int max_iterations) {
    auto r = try_newton(sec, seed, max_iterations);
    if (!r) throw CertificationFailure(fmt::format("Newton iteration from ({}, {}) did not converge", seed.real(),
                                                   seed.imag()));
    return *r;
}

CMatrix null_space_weights(const SecularFunction& sec, cplx omega, int multiplicity) {
    const CMatrix s = sec.matrix(omega);
    Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeFullV);
    const int n = sec.size();
    CMatrix w = svd.matrixV().rightCols(multiplicity);
    for (int j = 0; j < multiplicity; ++j) w.col(j) = phase_normalized(w.col(j));
    (void)n;
    return w;
}

EigenModeSet find_modes(const SlabParams& params, const SearchBox& box, const SolverOptions& opts) {
    params.validate();
    if (box.re_min <= 0.0 && box.re_max >= 0.0 && box.im_min <= 0.0 && box.im_max >= 0.0)
        throw InvalidParameter("search box must exclude omega = 0");
    const SecularFunction sec(params);
    Isolator iso{sec, opts, [&sec](cplx w) { return sec.det(w); }, {}, 0};
    const int total = count_zeros(iso.f, box, opts.contour);
    iso.run(box, total);
    for (const auto& m : iso.found)
        if (!(m.omega.im < 0.0))
            throw CertificationFailure(
                fmt::format("root ({}, {}) is not in the lower half plane", m.omega.re, m.omega.im));
    EigenModeSet set;
    set.modes = std::move(iso.found);
    set.n_expected = total;
    set.certified = set.total_multiplicity() == total;
    label_modes(set, params.n_layers);
    std::sort(set.modes.begin(), set.modes.end(), [](const EigenMode& a, const EigenMode& b) {
        if ((a.omega.re > 0.0) != (b.omega.re > 0.0)) return a.omega.re > 0.0;
        return a.omega.gamma() > b.omega.gamma();
    });
    return set;
}

EigenModeSet find_all_modes(const SlabParams& params, const SolverOptions& opts) {
    return find_all_modes(params, default_search_box(params), opts);
}

EigenModeSet find_all_modes(const SlabParams& params, const SearchBox& box, const SolverOptions& opts) {
    EigenModeSet pos = find_modes(params, box, opts);
    EigenModeSet neg = find_modes(params, box.mirrored(), opts);
    EigenModeSet set;
    set.n_expected = 2 * params.n_layers;
    set.modes = pos.modes;
    set.modes.insert(set.modes.end(), neg.modes.begin(), neg.modes.end());
    bool paired = pos.modes.size() == neg.modes.size();
    for (const auto& p : pos.modes) {
        const cplx partner = -std::conj(p.omega.value());
        const auto it = std::find_if(neg.modes.begin(), neg.modes.end(), [&](const EigenMode& q) {
            return q.multiplicity == p.multiplicity &&
                   std::abs(q.omega.value() - partner) <= 1e-9 * std::max(1.0, std::abs(partner));
        });
        if (it == neg.modes.end()) paired = false;
    }
    set.pairing_ok = paired;
    set.certified = pos.certified && neg.certified && paired && set.total_multiplicity() == set.n_expected;
    return set;
}

TransformT transform_t(cplx omega, const SlabParams& params) {
    if (params.n_layers != 3)
        throw Unsupported(fmt::format("the diagonalizing transform is defined for N = 3, got N = {}", params.n_layers));
    const CMatrix d = d_matrix_exact(omega, params.delta0);
    TransformT t;
    t.a = d(0, 0);
    t.b = d(1, 1);
    t.c = d(1, 0);
    t.e = d(0, 2);
    const cplx q = t.b - t.a - t.e;
    if (std::abs(q) < 1e-12) throw DegenerateTransform("B - A - E vanishes; transform undefined");
    t.m = 1.0 / std::sqrt(1.0 + 2.0 * t.c * t.c / (q * q));
    const double r2 = 1.0 / std::sqrt(2.0);
    const cplx cq = t.c * t.m / q;
    t.t.resize(3, 3);
    t.t << t.m * r2, -std::sqrt(2.0) * cq, t.m * r2, cq, t.m, cq, r2, 0.0, -r2;
    return t;
}

double transform_t_residual(const TransformT& t, cplx omega, const SlabParams& params) {
    const CMatrix d = d_matrix_exact(omega, params.delta0);
    CMatrix r = t.t * d * t.t.transpose();
    r.diagonal().setZero();
    return r.cwiseAbs().maxCoeff();
}

std::vector<LayerMode> eigenmode_weights_to_layer_basis(const EigenModeSet& set) {
    std::vector<LayerMode> out;
    if (set.modes.empty()) return out;
    const int n = static_cast<int>(set.modes.front().weights.rows());
    const CMatrix u = layer_to_k_transform(n);
    for (const auto& m : set.modes) out.push_back({m.omega.label, m.omega.value(), u.transpose() * m.weights});
    return out;
}

double overlap(const CVector& a, const CVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace slabrad

// acceptance: one PASS/FAIL line per criterion

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <fmt/format.h>

#include "slabrad/commands.hpp"
#include "slabrad/contour.hpp"
#include "slabrad/dynamics.hpp"
#include "slabrad/oracle.hpp"
#include "slabrad/spectrum.hpp"

using namespace slabrad;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

SlabParams params(int n, double delta0, double g) {
    SlabParams p;
    p.n_layers = n;
    p.delta0 = delta0;
    p.g = g;
    return p;
}

double gamma_super(const EigenModeSet& s) { return s.positive().front()->omega.gamma(); }

int failures = 0;

void run(int id, double budget, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0.0) o.require(dt < budget, fmt::format("runtime {:.2f} s < {} s", dt, budget));
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
}

ExcitonMoments random_state(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> r;
    CVector u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u(i) = {r(rng), r(rng)};
        v(i) = {r(rng), r(rng)};
    }
    ExcitonMoments m = coherent_in_mode(u, cplx(r(rng), r(rng)));
    m.normal += occupation_in_mode(v, std::abs(r(rng)) + 0.5).normal;
    return m;
}

// Leading-order mode occupations (N = 3 order: B0, B+, B-) as k-basis moments.
ExcitonMoments from_mode_basis(const CVector& mean, const CMatrix& normal) {
    const CMatrix w = leading_mode_basis(3);
    ExcitonMoments m = ExcitonMoments::vacuum(3);
    m.mean = w.transpose() * mean;
    m.normal = w.transpose() * normal * w.conjugate();
    m.anomalous = m.mean * m.mean.transpose();
    return m;
}

}  // namespace

int main() {
    const double g = 1e-4, d = 1e-2;

    run(1, 1.0, [&] {
        Outcome o;
        const EigenModeSet s = find_all_modes(params(2, d, g));
        const auto* m1 = s.find("1");
        const auto* m2 = s.find("2");
        const double tol = 5.0 * std::max(g * g, g * d * d);
        o.require(s.certified, "certified");
        o.require(std::abs(m1->omega.gamma() / g - 1.0) <= 1e-2, fmt::format("G1/eta = {:.6f}", m1->omega.gamma() / g));
        o.require(std::abs(m2->omega.gamma() / (g * d * d / 4.0) - 1.0) <= 5e-2,
                  fmt::format("G2/(eta d^2/4) = {:.6f}", m2->omega.gamma() / (g * d * d / 4.0)));
        const double e1 = std::abs(m1->omega.re - (1.0 - g * g / 2.0 + g * d / 2.0));
        const double e2 = std::abs(m2->omega.re - (1.0 - g * d / 2.0));
        o.require(e1 <= tol, fmt::format("|dOmega1| = {:.2e}", e1));
        o.require(e2 <= tol, fmt::format("|dOmega2| = {:.2e} (tol {:.1e})", e2, tol));
        return o;
    });

    run(2, 1.0, [&] {
        Outcome o;
        const EigenModeSet s = find_all_modes(params(3, d, g));
        o.require(s.certified, "certified");
        const double r0 = s.find("0")->omega.gamma() / (1.5 * g);
        const double r1 = s.find("1")->omega.gamma() / (g * d * d / 27.0);
        const double rm = s.find("-1")->omega.gamma() / (g * d * d);
        o.require(std::abs(r0 - 1.0) <= 1e-2, fmt::format("G0/(3eta/2) = {:.6f}", r0));
        o.require(std::abs(r1 - 1.0) <= 5e-2, fmt::format("G1/(eta d^2/27) = {:.6f}", r1));
        o.require(std::abs(rm - 1.0) <= 5e-2, fmt::format("G-1/(eta d^2) = {:.6f}", rm));
        return o;
    });

    run(3, 10.0, [&] {
        Outcome o;
        for (int n = 1; n <= 5; ++n) {
            const SlabParams p = params(n, d, g);
            const SecularFunction sec(p);
            const Holomorphic f = [&sec](cplx w) { return sec.det(w); };
            const SearchBox box = default_search_box(p);
            const int count = count_zeros(f, box) + count_zeros(f, box.mirrored());
            const EigenModeSet s = find_all_modes(p);
            bool lower = true;
            for (const auto& m : s.modes) lower = lower && m.omega.im < 0.0;
            o.require(count == 2 * n && s.certified && s.pairing_ok && lower,
                      fmt::format("N={}: {} zeros", n, count));
        }
        return o;
    });

    run(4, 0.0, [&] {
        Outcome o;
        const double mono = gamma_super(find_all_modes(params(1, d, g)));
        for (int n = 1; n <= 3; ++n) {
            const double ratio = gamma_super(find_all_modes(params(n, d, g))) / mono;
            o.require(std::abs(ratio / n - 1.0) <= 1e-2, fmt::format("N={}: {:.5f}", n, ratio));
        }
        return o;
    });

    run(5, 0.0, [&] {
        Outcome o;
        for (int n = 2; n <= 3; ++n) {
            const auto modes = eigenmode_weights_to_layer_basis(find_all_modes(params(n, d, g)));
            const std::string super = n == 2 ? "1" : "0";
            for (const auto& m : modes)
                if (m.label == super) {
                    const double ov = overlap(m.layer_weights.col(0), CVector::Ones(n));
                    o.require(ov >= 0.9999, fmt::format("N={} super {:.8f}", n, ov));
                }
            if (n != 3) continue;
            CVector a(3), b(3);
            a << -1.0, 2.0, -1.0;
            b << 1.0, 0.0, -1.0;
            for (const auto& [label, target, name] :
                 {std::tuple{"1", a, "(-1,2,-1)"}, std::tuple{"-1", b, "(1,0,-1)"}})
                for (const auto& m : modes)
                    if (m.label == label) {
                        const double ov = overlap(m.layer_weights.col(0), target);
                        o.require(ov >= 0.9999, fmt::format("mode {} vs {} {:.8f}", label, name, ov));
                    }
        }
        return o;
    });

    run(6, 0.0, [&] {
        Outcome o;
        for (int n = 2; n <= 3; ++n) {
            const SlabParams p = params(n, d, g);
            const EigenModeSet s = find_all_modes(p);
            CVector layer = CVector::Zero(n);
            layer(0) = 1.0;
            const ExcitonMoments mom = moments_from_state_spec(CoherentSpec{StateBasis::layer, {layer.data(), layer.data() + n}}, n);
            const double eta = p.eta(), etap = p.eta_prime();
            const std::vector<std::pair<std::string, double>> expect =
                n == 2 ? std::vector<std::pair<std::string, double>>{{"1|1", 2 * eta}, {"2|2", 2 * etap}, {"1|2", eta + etap}}
                       : std::vector<std::pair<std::string, double>>{
                             {"0|0", 3 * eta}, {"1|1", 8 * etap / 27}, {"-1|-1", 8 * etap}};
            for (const auto& [label, rate] : expect) {
                const double fit = fitted_component_rate(s, mom, p, label);
                o.require(std::abs(fit / rate - 1.0) <= 2e-2, fmt::format("N={} {} {:.5f}", n, label, fit / rate));
            }
        }
        // cross flux between B0 and B+- built from the mode-off-diagonal moments
        const SlabParams p = params(3, d, g);
        const EigenModeSet s = find_all_modes(p);
        const double z = 1.0;
        const DetectorSpec det{z, uniform_times(z, z + 3.0 / (1.5 * g), 301), DetectorSide::positive};
        auto cross = [&](const ExcitonMoments& m) {
            const MomentSplit split = split_moments(m, leading_mode_basis(3));
            const FluxTrace tr = flux_trace(s, split.off_diagonal, det, p);
            std::vector<double> out(tr.times.size(), 0.0);
            for (const auto& c : tr.components)
                if (c.label == "0|1" || c.label == "0|-1")
                    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c.values[i];
            return std::pair{out, flux_trace(s, m, det, p).total};
        };
        CMatrix occ = CMatrix::Zero(3, 3);
        occ.diagonal() << 1.0, 2.0, 1.0;
        const auto [s2, total] = cross(from_mode_basis(CVector::Zero(3), occ));
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < s2.size(); ++i) {
            worst = std::max(worst, std::abs(s2[i]));
            scale = std::max(scale, std::abs(total[i]));
        }
        o.require(worst <= 1e-14 * scale, fmt::format("Fock-diagonal cross flux {:.1e} of peak", worst / scale));

        // compare the cross flux at tau = 0+ with the closed form for coherent superpositions
        for (int which = 1; which <= 2; ++which) {
            CVector mean = CVector::Zero(3);
            mean(0) = 1.0;
            mean(which) = cplx(0.0, 1.0);
            const auto [c2, tot] = cross(from_mode_basis(mean, mean.conjugate() * mean.transpose()));
            const cplx bpb0 = std::conj(mean(1)) * mean(0), bmb0 = std::conj(mean(2)) * mean(0);
            const cplx closed = -kI * (d / (6.0 * std::sqrt(3.0))) *
                               ((bpb0 - std::conj(bpb0)) + kI * 3.0 * std::sqrt(3.0) * (bmb0 - std::conj(bmb0)));
            std::printf("    info: cross flux at tau=0+ with B0 and B%s excited: %.6e (closed form %.6e)\n",
                        which == 1 ? "+" : "-", c2[0], closed.real());
        }
        return o;
    });

    run(7, 0.0, [&] {
        Outcome o;
        for (int n = 2; n <= 3; ++n) {
            const SlabParams p = params(n, d, g);
            const EigenModeSet s = find_all_modes(p);
            for (unsigned seed : {11u, 12u, 13u}) {
                const ExcitonMoments m = random_state(n, seed);
                const double ratio = energy_bookkeeping(s, m, p) / m.total_excitation();
                o.require(std::abs(ratio - 1.0) <= 2e-2, fmt::format("N={} seed {} {:.6f}", n, seed, ratio));
            }
        }
        return o;
    });

    run(8, 180.0, [&] {
        Outcome o;
        const double z = 2.0;
        for (int n = 1; n <= 3; ++n) {
            const SlabParams p = params(n, 0.1, 0.1);
            const double span = 3.0 / gamma_super(find_all_modes(p));
            ExcitonMoments layer = ExcitonMoments::vacuum(n);
            layer.mean = CVector::Constant(n, cplx(0.0, 1.0 / std::sqrt(double(n))));
            const CVector mu = ExcitonMoments::from_layer_basis(layer).mean;
            const OracleComparison r = compare_oracle(p, BathConfig::for_run(z + span, z), mu, z, span);
            o.require(r.relative_l2 <= 2e-2, fmt::format("N={} L2 {:.4f}", n, r.relative_l2));
            o.require(r.precone_ratio <= 1e-3, fmt::format("pre-cone {:.1e}", r.precone_ratio));
            o.require(r.analytic_precone == 0.0, "analytic pre-cone 0");
        }
        return o;
    });

    run(9, 0.0, [&] {
        Outcome o;
        for (int n = 2; n <= 3; ++n) {
            const SlabParams p = params(n, d, g);
            const EigenModeSet s = find_all_modes(p);
            std::vector<int> occ(n, 0);
            std::vector<double> mean_occ(n, 0.0);
            std::vector<cplx> amp(n, 0.0);
            occ[0] = 1;
            mean_occ[0] = 1.0;
            amp[0] = 1.0;
            const auto fock = moments_from_state_spec(FockSpec{StateBasis::layer, occ}, n);
            const auto chaotic = moments_from_state_spec(ChaoticSpec{StateBasis::layer, mean_occ}, n);
            const auto coherent = moments_from_state_spec(CoherentSpec{StateBasis::layer, amp}, n);
            const DetectorSpec det{1.0, uniform_times(1.0, 1.0 + 3.0 / gamma_super(s), 201), DetectorSide::positive};
            double fock_max = 0.0, chaotic_max = 0.0, coherent_max = 0.0;
            for (const cplx e : field_trace(s, fock, det, p).envelope) fock_max = std::max(fock_max, std::abs(e));
            for (const cplx e : field_trace(s, chaotic, det, p).envelope) chaotic_max = std::max(chaotic_max, std::abs(e));
            for (const cplx e : field_trace(s, coherent, det, p).envelope) coherent_max = std::max(coherent_max, std::abs(e));
            o.require(fock_max == 0.0 && chaotic_max == 0.0, fmt::format("N={} <eps> = 0 for Fock and chaotic", n));
            o.require(coherent_max > 0.1, fmt::format("coherent |eps| {:.3f}", coherent_max));
            const FluxTrace a = flux_trace(s, fock, det, p), b = flux_trace(s, chaotic, det, p);
            double diff = 0.0;
            for (std::size_t i = 0; i < a.total.size(); ++i) diff = std::max(diff, std::abs(a.total[i] - b.total[i]));
            o.require(diff <= 1e-12, fmt::format("flux difference {:.1e}", diff));
        }
        return o;
    });

    run(10, 0.0, [&] {
        Outcome o;
        std::vector<double> ds, rs;
        for (double delta : {2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2}) {
            ds.push_back(delta);
            rs.push_back(d_matrix_expansion_check(1.0, params(3, delta, g)));
        }
        const double slope = log_log_slope(ds, rs);
        o.require(std::abs(slope - 3.0) <= 0.1, fmt::format("expansion slope {:.4f}", slope));
        const SlabParams p = params(3, d, g);
        const cplx w = find_all_modes(p).find("0")->omega.value();
        const double res = transform_t_residual(transform_t(w, p), w, p);
        o.require(res <= 1e-5, fmt::format("T residual {:.2e}", res));
        return o;
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

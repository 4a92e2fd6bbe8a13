#include "slabrad/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "slabrad/fitting.hpp"

namespace slabrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

EigenModeSet solve(const RunConfig& cfg, const SlabParams& p, bool seed_only, bool use_box = true) {
    if (seed_only) return perturbative_roots(p);
    const SolverOptions opts = cfg.solver.options();
    if (use_box && cfg.solver.box) return find_all_modes(p, *cfg.solver.box, opts);
    return find_all_modes(p, opts);
}

void note_certification(CommandOutput& out, const EigenModeSet& set, bool seed_only) {
    out.meta["certified"] = set.certified;
    out.meta["pairing_ok"] = set.pairing_ok;
    out.meta["seed_only"] = seed_only;
    if (seed_only) return;
    if (!set.certified || !set.pairing_ok) {
        out.status = 1;
        out.diagnostics.push_back(fmt::format("root census not certified: found {} of {} expected, pairing {}",
                                              set.total_multiplicity(), set.n_expected,
                                              set.pairing_ok ? "ok" : "broken"));
    }
}

double gamma_super(const EigenModeSet& set) {
    double g = 0.0;
    for (const EigenMode* m : set.positive()) g = std::max(g, m->omega.gamma());
    return g;
}

double gamma_sub(const EigenModeSet& set) {
    double g = std::numeric_limits<double>::infinity();
    for (const EigenMode* m : set.positive()) g = std::min(g, m->omega.gamma());
    return g;
}

ExcitonMoments probe_state(int n) {
    ExcitonMoments layer = ExcitonMoments::vacuum(n);
    layer.mean(0) = 1.0;
    layer.normal(0, 0) = 1.0;
    layer.anomalous(0, 0) = 1.0;
    return ExcitonMoments::from_layer_basis(layer);
}

std::string format_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double v) const { return fmt::format("{:.17g}", v == 0.0 ? 0.0 : v); }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

Json cell_json(const Cell& c) {
    return std::visit([](const auto& v) -> Json { return v; }, c);
}

Check make_check(std::string name, double measured, double tolerance, std::string message = {}) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tolerance;
    c.passed = std::isfinite(measured) && measured <= tolerance;
    c.message = std::move(message);
    return c;
}

Check skipped_check(std::string name, std::string why) {
    Check c;
    c.name = std::move(name);
    c.passed = true;
    c.skipped = true;
    c.measured = kNaN;
    c.message = std::move(why);
    return c;
}

struct ClosedForm {
    std::string label;
    double gamma;
    double tolerance;
};

std::vector<ClosedForm> closed_form_rates(const SlabParams& p) {
    const double g = p.g, d = p.delta0;
    switch (p.n_layers) {
    case 2:
        return {{"1", g, 1e-2}, {"2", 0.25 * g * d * d, 5e-2}};
    case 3:
        return {{"0", 1.5 * g, 1e-2}, {"1", g * d * d / 27.0, 5e-2}, {"-1", g * d * d, 5e-2}};
    default:
        return {};
    }
}

// Component label and closed-form rate: {2 eta, 2 eta', eta + eta'} and {3 eta, 8 eta'/27, 8 eta'}.
std::vector<ClosedForm> closed_form_flux_rates(const SlabParams& p) {
    const double eta = p.eta(), etap = p.eta_prime();
    switch (p.n_layers) {
    case 2:
        return {{"1|1", 2.0 * eta, 2e-2}, {"2|2", 2.0 * etap, 2e-2}, {"1|2", eta + etap, 2e-2}};
    case 3:
        return {{"0|0", 3.0 * eta, 2e-2}, {"1|1", 8.0 * etap / 27.0, 2e-2}, {"-1|-1", 8.0 * etap, 2e-2}};
    default:
        return {};
    }
}

}  // namespace

double fitted_component_rate(const EigenModeSet& modes, const ExcitonMoments& moments, const SlabParams& params,
                             const std::string& label) {
    // Locate the component, then sample it over three of its own e-folding times.
    DetectorSpec probe{params.half_thickness() + 1.0, {params.half_thickness() + 1.0}, DetectorSide::positive};
    const FluxTrace first = flux_trace(modes, moments, probe, params);
    const auto it = std::find_if(first.components.begin(), first.components.end(),
                                 [&](const FluxComponent& c) { return c.label == label; });
    if (it == first.components.end()) throw InvalidParameter(fmt::format("no flux component '{}'", label));
    const double span = 3.0 / it->rate;
    DetectorSpec det{probe.z, uniform_times(probe.z, probe.z + span, 400), DetectorSide::positive};
    const FluxTrace tr = flux_trace(modes, moments, det, params);
    const auto& comp = tr.components[it - first.components.begin()];
    if (comp.first == comp.second) return extract_rates(tr.times, comp.values).front().gamma;
    // A real cross term is a +-(Omega_a - Omega_b) pair sharing one decay rate.
    FitOptions opts;
    opts.n_terms = 2;
    const auto fits = extract_rates(tr.times, comp.values, opts);
    return 0.5 * (fits[0].gamma + fits[1].gamma);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("slope needs at least two matching points");
    std::vector<double> lx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidParameter("log-log slope needs positive values");
        lx.push_back(std::log(x[i]));
    }
    return -log_linear_rate(lx, y);
}

OracleComparison compare_oracle(const SlabParams& params, const BathConfig& bath, const CVector& mu, double z,
                                double t_span) {
    OracleComparison res;
    const double t_max = z + t_span;
    bath.validate(t_max, z);
    const EigenModeSet modes = find_all_modes(params);
    ExcitonMoments mom = coherent_in_mode(mu / mu.norm(), mu.norm());

    const OracleSimulator sim(params, bath);
    const int record_every = std::max(1, static_cast<int>(std::lround(0.02 / bath.dt)));
    const auto start = std::chrono::steady_clock::now();
    const auto run = sim.run(mu, t_max, z, record_every);
    res.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    DetectorSpec det{z, run.times, DetectorSide::positive};
    const FieldTrace ft = field_trace(modes, mom, det, params);
    const double front = z - params.half_thickness() - 20.0 / bath.q_max;
    double num = 0.0, den = 0.0, pre = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const double t = run.times[i];
        const double analytic = 2.0 * ft.envelope[i].real();
        peak = std::max(peak, std::abs(run.field[i]));
        if (t < front) pre = std::max(pre, std::abs(run.field[i]));
        if (t < z) res.analytic_precone = std::max(res.analytic_precone, std::abs(ft.envelope[i]));
        if (t >= z && t <= t_max) {
            num += (run.field[i] - analytic) * (run.field[i] - analytic);
            den += analytic * analytic;
        }
    }
    res.relative_l2 = std::sqrt(num / den);
    res.precone_ratio = pre / peak;
    const double e0 = run.energy.front();
    for (double e : run.energy) res.energy_drift = std::max(res.energy_drift, std::abs(e - e0) / std::abs(e0));
    return res;
}

CommandOutput cmd_modes(const RunConfig& cfg, bool seed_only) {
    const SlabParams& p = cfg.params;
    CommandOutput out;
    out.command = "modes";
    const EigenModeSet set = solve(cfg, p, seed_only);
    std::optional<EigenModeSet> seeds;
    if (p.n_layers <= 3) seeds = perturbative_roots(p);

    const int n = p.n_layers;
    out.table.columns = {"label", "omega", "gamma", "multiplicity", "certified", "paired", "box_re_min",
                         "box_re_max", "box_im_min", "box_im_max", "winding", "residual", "seed_error"};
    for (int i = 0; i < n; ++i) {
        out.table.columns.push_back(fmt::format("w{}_re", i));
        out.table.columns.push_back(fmt::format("w{}_im", i));
    }
    for (const EigenMode& m : set.modes) {
        double seed_error = kNaN;
        if (seeds)
            if (const EigenMode* s = seeds->find(m.omega.label)) seed_error = std::abs(s->omega.value() - m.omega.value());
        const auto& b = m.cert.box;
        std::vector<Cell> row{m.omega.label,           m.omega.re,        m.omega.gamma(),
                              long{m.multiplicity},    m.cert.certified,  set.pairing_ok,
                              b.re_min,                b.re_max,          b.im_min,
                              b.im_max,                long{m.cert.winding}, m.cert.residual,
                              seed_error};
        const CVector w = m.weight();
        for (int i = 0; i < n; ++i) {
            row.emplace_back(w(i).real());
            row.emplace_back(w(i).imag());
        }
        out.table.rows.push_back(std::move(row));
    }
    note_certification(out, set, seed_only);
    out.meta["units"] = {{"omega", "Omega"}, {"gamma", "Omega"}, {"weights", "k basis, ascending k"}};
    for (const auto& w : p.warnings()) out.diagnostics.push_back(w);
    return out;
}

CommandOutput cmd_field(const RunConfig& cfg, bool seed_only) {
    const SlabParams& p = cfg.params;
    CommandOutput out;
    out.command = "field";
    const DetectorSpec det = cfg.detector.spec();
    try {
        det.validate(p);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    const EigenModeSet set = solve(cfg, p, seed_only);
    const ExcitonMoments mom = cfg.state.moments(p.n_layers);
    const FieldTrace tr = field_trace(set, mom, det, p);
    out.table.columns = {"t", "re_eps", "im_eps"};
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        out.table.rows.push_back({tr.times[i], tr.envelope[i].real(), tr.envelope[i].imag()});
    note_certification(out, set, seed_only);
    out.meta["units"] = {{"t", "1/Omega"}, {"re_eps", "E0"}, {"im_eps", "E0"}};
    out.meta["retarded_time_origin"] = tr.retarded_time_origin;
    out.meta["field_convention"] = "E(t) = 2 Re[eps(t)], eps carries exp(-i omega tau)";
    return out;
}

CommandOutput cmd_flux(const RunConfig& cfg, bool seed_only) {
    const SlabParams& p = cfg.params;
    CommandOutput out;
    out.command = "flux";
    const DetectorSpec det = cfg.detector.spec();
    try {
        det.validate(p);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    const EigenModeSet set = solve(cfg, p, seed_only);
    const ExcitonMoments mom = cfg.state.moments(p.n_layers);
    const FluxTrace tr = flux_trace(set, mom, det, p);
    out.table.columns = {"t", "flux_total"};
    Json comps = Json::array();
    for (std::size_t c = 0; c < tr.components.size(); ++c) {
        const std::string col = fmt::format("flux_comp_{}", c + 1);
        out.table.columns.push_back(col);
        comps.push_back({{"column", col}, {"modes", tr.components[c].label}, {"rate", tr.components[c].rate}});
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<Cell> row{tr.times[i], tr.total[i]};
        for (const auto& comp : tr.components) row.emplace_back(comp.values[i]);
        out.table.rows.push_back(std::move(row));
    }
    note_certification(out, set, seed_only);
    out.meta["components"] = comps;
    out.meta["units"] = {{"t", "1/Omega"}, {"flux", "S0"}};
    out.meta["retarded_time_origin"] = det.z;
    return out;
}

CommandOutput cmd_sweep(const RunConfig& cfg, bool seed_only) {
    const auto& sw = cfg.sweep;
    if (sw.values.empty()) throw ConfigError("sweep.values is empty");
    CommandOutput out;
    out.command = "sweep";
    out.meta["parameter"] = sw.parameter;
    bool certified = true;
    auto run = [&](const SlabParams& p) {
        const EigenModeSet set = solve(cfg, p, seed_only, false);
        certified = certified && (seed_only || (set.certified && set.pairing_ok));
        return set;
    };

    if (sw.parameter == "n_layers") {
        SlabParams mono = cfg.params;
        mono.n_layers = 1;
        mono.physical.reset();
        const double g_mono = gamma_super(run(mono));
        out.table.columns = {"n_layers", "gamma_super", "gamma_mono", "ratio"};
        for (double v : sw.values) {
            if (v < 1.0 || v != std::floor(v)) throw ConfigError(fmt::format("sweep over n_layers needs integers >= 1, got {}", v));
            SlabParams p = cfg.params;
            p.n_layers = static_cast<int>(v);
            const double gs = gamma_super(run(p));
            out.table.rows.push_back({long{p.n_layers}, gs, g_mono, gs / g_mono});
        }
    } else {
        out.table.columns = {sw.parameter, "gamma_super", "gamma_sub"};
        std::vector<double> xs, supers, subs;
        for (double v : sw.values) {
            SlabParams p = cfg.params;
            p.physical.reset();
            (sw.parameter == "g" ? p.g : p.delta0) = v;
            try {
                p.validate();
            } catch (const InvalidParameter& e) {
                throw ConfigError(e.what());
            }
            const EigenModeSet set = run(p);
            const double gs = gamma_super(set);
            const double gb = p.n_layers > 1 ? gamma_sub(set) : kNaN;
            xs.push_back(v);
            supers.push_back(gs);
            subs.push_back(gb);
            out.table.rows.push_back({v, gs, gb});
        }
        if (xs.size() >= 2) {
            out.meta["slope_gamma_super"] = log_log_slope(xs, supers);
            if (cfg.params.n_layers > 1) out.meta["slope_gamma_sub"] = log_log_slope(xs, subs);
        }
    }
    out.meta["certified"] = certified;
    out.meta["seed_only"] = seed_only;
    if (!certified) {
        out.status = 1;
        out.diagnostics.push_back("at least one sweep point failed root certification");
    }
    out.meta["units"] = {{"gamma", "Omega"}};
    return out;
}

std::vector<Check> validation_checks(const RunConfig& cfg) {
    const SlabParams& p = cfg.params;
    const int n = p.n_layers;
    std::vector<Check> checks;
    const EigenModeSet set = solve(cfg, p, false);

    {
        Check c = make_check("root_census", std::abs(set.total_multiplicity() - 2 * n), 0.0,
                             fmt::format("{} roots in the default boxes, expected {}", set.total_multiplicity(), 2 * n));
        c.passed = c.passed && set.certified && set.pairing_ok;
        if (!set.pairing_ok) c.message += "; +-Omega pairing broken";
        checks.push_back(c);
    }

    const bool perturbative = p.warnings().empty();
    if (n == 1) {
        const double gamma = gamma_super(set);
        checks.push_back(make_check("rate_monolayer", std::abs(gamma / (0.5 * p.g) - 1.0), 1e-10,
                                    "single layer decays at g/2"));
    }
    for (const auto& cf : closed_form_rates(p)) {
        const std::string name = fmt::format("rate_{}", cf.label);
        if (!perturbative) {
            checks.push_back(skipped_check(name, "closed form only holds for small g and delta0"));
            continue;
        }
        const EigenMode* m = set.find(cf.label);
        checks.push_back(make_check(name, m ? std::abs(m->omega.gamma() / cf.gamma - 1.0) : kNaN, cf.tolerance,
                                    fmt::format("Gamma_{} against {:.6e}", cf.label, cf.gamma)));
    }

    if (perturbative) {
        SlabParams mono = p;
        mono.n_layers = 1;
        mono.physical.reset();
        const double ratio = gamma_super(set) / gamma_super(find_all_modes(mono));
        checks.push_back(make_check("superradiant_ratio", std::abs(ratio / n - 1.0), 1e-2,
                                    fmt::format("Gamma_super / Gamma_mono = {:.6f}", ratio)));
    } else {
        checks.push_back(skipped_check("superradiant_ratio", "scaling with N only holds for small g"));
    }

    const ExcitonMoments probe = probe_state(n);
    for (const auto& cf : closed_form_flux_rates(p)) {
        const std::string name = fmt::format("flux_rate_{}", cf.label);
        if (!perturbative) {
            checks.push_back(skipped_check(name, "closed form only holds for small g and delta0"));
            continue;
        }
        double rel = kNaN;
        std::string msg;
        try {
            const double fit = fitted_component_rate(set, probe, p, cf.label);
            rel = std::abs(fit / cf.gamma - 1.0);
            msg = fmt::format("fitted {:.6e} against {:.6e}", fit, cf.gamma);
        } catch (const Error& e) {
            msg = e.what();
        }
        checks.push_back(make_check(name, rel, cf.tolerance, msg));
    }

    {
        ExcitonMoments state = cfg.state.moments(n);
        if (!(state.total_excitation() > 0.0)) state = probe;
        const double emitted = energy_bookkeeping(set, state, p);
        const double initial = state.total_excitation();
        checks.push_back(make_check("energy_bookkeeping", std::abs(emitted / initial - 1.0), 2e-2,
                                    fmt::format("emitted {:.8f} of {:.8f} quanta", emitted, initial)));
    }

    {
        std::vector<int> occ(n, 0);
        std::vector<double> mean_occ(n, 0.0);
        occ[0] = 1;
        mean_occ[0] = 1.0;
        const ExcitonMoments fock = moments_from_state_spec(FockSpec{StateBasis::k, occ}, n);
        const ExcitonMoments chaotic = moments_from_state_spec(ChaoticSpec{StateBasis::k, mean_occ}, n);
        const double z = p.half_thickness() + 1.0;
        const DetectorSpec det{z, uniform_times(z, z + 3.0 / gamma_super(set), 200), DetectorSide::positive};
        double field_max = 0.0;
        for (const cplx e : field_trace(set, fock, det, p).envelope) field_max = std::max(field_max, std::abs(e));
        checks.push_back(make_check("fock_field_zero", field_max, 0.0, "mean field of a Fock state"));
        const FluxTrace a = flux_trace(set, fock, det, p);
        const FluxTrace b = flux_trace(set, chaotic, det, p);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < a.total.size(); ++i) {
            diff = std::max(diff, std::abs(a.total[i] - b.total[i]));
            scale = std::max(scale, std::abs(a.total[i]));
        }
        checks.push_back(make_check("fock_chaotic_flux", diff / scale, 1e-12, "Fock and chaotic flux with equal n"));
    }

    {
        const auto& oc = cfg.oracle;
        SlabParams op;
        op.n_layers = n;
        op.g = oc.g;
        op.delta0 = oc.delta0;
        const double t_span = 3.0 / gamma_super(find_all_modes(op));
        const double t_max = oc.z + t_span;
        BathConfig bath = BathConfig::for_run(t_max, oc.z, oc.q_max);
        if (oc.box_length) bath.box_length = *oc.box_length;
        if (oc.dt) bath.dt = *oc.dt;
        bath.two_photon = oc.two_photon;
        bath.counter_rotating = oc.counter_rotating;
        Check bath_check;
        bath_check.name = "oracle_bath";
        try {
            bath.validate(t_max, oc.z);
            bath_check.passed = true;
            bath_check.message = fmt::format("L = {:.1f}, q_max = {}, dt = {:.3e}", bath.box_length, bath.q_max, bath.dt);
        } catch (const ConfigError& e) {
            bath_check.message = e.what();
        }
        bath_check.measured = bath.dt;
        bath_check.tolerance = 0.05 / bath.q_max;
        checks.push_back(bath_check);
        if (bath_check.passed) {
            ExcitonMoments layer = ExcitonMoments::vacuum(n);
            layer.mean = CVector::Constant(n, cplx(0.0, 1.0 / std::sqrt(double(n))));
            const CVector mu = ExcitonMoments::from_layer_basis(layer).mean;
            const OracleComparison r = compare_oracle(op, bath, mu, oc.z, t_span);
            checks.push_back(make_check("oracle_field_l2", r.relative_l2, 2e-2,
                                        fmt::format("oracle run took {:.1f} s", r.runtime)));
            checks.push_back(make_check("oracle_precone", r.precone_ratio, 1e-3, "pre-light-cone field / peak"));
            checks.push_back(make_check("analytic_precone", r.analytic_precone, 0.0, "analytic field before t = z"));
            checks.push_back(make_check("oracle_energy_drift", r.energy_drift, 1e-6, "bath plus exciton energy"));
        }
    }
    return checks;
}

CommandOutput cmd_validate(const RunConfig& cfg) {
    CommandOutput out;
    out.command = "validate";
    out.table.columns = {"check", "passed", "skipped", "measured", "tolerance", "message"};
    int failed = 0;
    for (const Check& c : validation_checks(cfg)) {
        out.table.rows.push_back({c.name, c.passed, c.skipped, c.measured, c.tolerance, c.message});
        if (!c.passed) {
            ++failed;
            out.diagnostics.push_back(fmt::format("check {} failed: {}", c.name, c.message));
        }
    }
    out.status = failed ? 1 : 0;
    out.meta["failed"] = failed;
    return out;
}

void write_table(std::ostream& os, const CommandOutput& out, const std::string& format) {
    if (format == "json") {
        Json rows = Json::array();
        for (const auto& r : out.table.rows) {
            Json row = Json::object();
            for (std::size_t i = 0; i < r.size(); ++i) row[out.table.columns[i]] = cell_json(r[i]);
            rows.push_back(row);
        }
        Json doc = {{"command", out.command}, {"status", out.status}, {"meta", out.meta}, {"rows", rows}};
        os << doc.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < out.table.columns.size(); ++i) os << (i ? "," : "") << out.table.columns[i];
    os << '\n';
    for (const auto& r : out.table.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::string s = format_cell(r[i]);
            if (s.find_first_of(",\"\n") != std::string::npos) {
                std::string q = "\"";
                for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                s = q + "\"";
            }
            os << (i ? "," : "") << s;
        }
        os << '\n';
    }
}

Json sidecar(const CommandOutput& out, const RunConfig& cfg) {
    Json j;
    j["command"] = out.command;
    j["config_hash"] = config_hash(cfg);
    j["config"] = to_json(cfg);
    j["status"] = out.status;
    for (const auto& [k, v] : out.meta.items()) j[k] = v;
    j["unit_system"] = "Omega = c = 1; times in 1/Omega, lengths in c/Omega, field in E0, flux in S0";
    if (cfg.params.physical && cfg.params.physical->area) {
        const UnitScales s = unit_scales(cfg.params);
        j["unit_scales"] = {{"time", s.time}, {"length", s.length}, {"field", s.field}, {"flux", s.flux}};
    } else {
        j["unit_scales"] = nullptr;
    }
    return j;
}

}  // namespace slabrad

#include "slabrad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace slabrad {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(fmt::format("{} must be a number", where));
    return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(fmt::format("{} must be an integer", where));
    return j.get<int>();
}

bool boolean(const Json& j, const std::string& where) {
    if (!j.is_boolean()) throw ConfigError(fmt::format("{} must be true or false", where));
    return j.get<bool>();
}

std::string string(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(fmt::format("{} must be a string", where));
    return j.get<std::string>();
}

cplx complex_value(const Json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(fmt::format("{} must be a number or [re, im]", where));
}

std::vector<cplx> complex_vector(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(fmt::format("{} must be an array", where));
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_value(j[i], fmt::format("{}[{}]", where, i)));
    return out;
}

std::vector<std::vector<cplx>> complex_matrix(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(fmt::format("{} must be an array of rows", where));
    std::vector<std::vector<cplx>> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_vector(j[i], fmt::format("{}[{}]", where, i)));
    return out;
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json complex_vector_json(const std::vector<cplx>& v) {
    Json a = Json::array();
    for (cplx z : v) a.push_back(complex_json(z));
    return a;
}

CMatrix to_matrix(const std::vector<std::vector<cplx>>& rows, int n, const char* what) {
    if (rows.empty()) return CMatrix::Zero(n, n);
    if (static_cast<int>(rows.size()) != n) throw ConfigError(fmt::format("state.{} needs {} rows", what, n));
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw ConfigError(fmt::format("state.{} row {} needs {} entries", what, i, n));
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

SlabParams parse_params(const Json& j) {
    check_keys(j, {"n_layers", "delta0", "g", "physical"}, "params");
    if (!j.contains("n_layers")) throw ConfigError("params.n_layers is required");
    const int n = integer(j["n_layers"], "params.n_layers");
    SlabParams p;
    if (j.contains("physical")) {
        const Json& u = j["physical"];
        check_keys(u, {"omega", "a", "d", "hbar", "c", "area"}, "params.physical");
        PhysicalUnits units;
        for (const char* key : {"omega", "a", "d", "hbar", "c"})
            if (!u.contains(key)) throw ConfigError(fmt::format("params.physical.{} is required", key));
        units.omega = number(u["omega"], "params.physical.omega");
        units.a = number(u["a"], "params.physical.a");
        units.d = number(u["d"], "params.physical.d");
        units.hbar = number(u["hbar"], "params.physical.hbar");
        units.c = number(u["c"], "params.physical.c");
        if (u.contains("area")) units.area = number(u["area"], "params.physical.area");
        p = derive_dimensionless(n, units);
        if (j.contains("delta0")) p.delta0 = number(j["delta0"], "params.delta0");
        if (j.contains("g")) p.g = number(j["g"], "params.g");
    } else {
        if (!j.contains("delta0") || !j.contains("g"))
            throw ConfigError("params needs delta0 and g (or a physical block)");
        p.n_layers = n;
        p.delta0 = number(j["delta0"], "params.delta0");
        p.g = number(j["g"], "params.g");
    }
    p.validate();
    return p;
}

StateBasis parse_basis(const Json& j) {
    const std::string b = string(j, "state.basis");
    if (b == "k") return StateBasis::k;
    if (b == "layer") return StateBasis::layer;
    throw ConfigError(fmt::format("state.basis must be 'k' or 'layer', got '{}'", b));
}

StateConfig parse_state(const Json& j) {
    check_keys(j, {"kind", "basis", "amplitudes", "occupations", "mean_occupations", "mean", "normal", "anomalous"},
               "state");
    StateConfig s;
    if (j.contains("kind")) s.kind = string(j["kind"], "state.kind");
    if (j.contains("basis")) s.basis = parse_basis(j["basis"]);
    const std::map<std::string, std::set<std::string>> fields = {{"vacuum", {}},
                                                                 {"coherent", {"amplitudes"}},
                                                                 {"fock", {"occupations"}},
                                                                 {"chaotic", {"mean_occupations"}},
                                                                 {"moments", {"mean", "normal", "anomalous"}}};
    const auto it = fields.find(s.kind);
    if (it == fields.end()) throw ConfigError(fmt::format("state.kind '{}' is not one of vacuum, coherent, fock, "
                                                          "chaotic, moments",
                                                          s.kind));
    for (const auto& [key, value] : j.items())
        if (key != "kind" && key != "basis" && !it->second.count(key))
            throw ConfigError(fmt::format("state.{} does not apply to kind '{}'", key, s.kind));
    if (j.contains("amplitudes")) s.amplitudes = complex_vector(j["amplitudes"], "state.amplitudes");
    if (j.contains("occupations")) {
        if (!j["occupations"].is_array()) throw ConfigError("state.occupations must be an array");
        for (const auto& x : j["occupations"]) s.occupations.push_back(integer(x, "state.occupations[]"));
    }
    if (j.contains("mean_occupations")) {
        if (!j["mean_occupations"].is_array()) throw ConfigError("state.mean_occupations must be an array");
        for (const auto& x : j["mean_occupations"]) s.mean_occupations.push_back(number(x, "state.mean_occupations[]"));
    }
    if (j.contains("mean")) s.mean = complex_vector(j["mean"], "state.mean");
    if (j.contains("normal")) s.normal = complex_matrix(j["normal"], "state.normal");
    if (j.contains("anomalous")) s.anomalous = complex_matrix(j["anomalous"], "state.anomalous");
    return s;
}

DetectorConfig parse_detector(const Json& j) {
    check_keys(j, {"z", "side", "t_start", "t_end", "samples"}, "detector");
    DetectorConfig d;
    if (j.contains("z")) d.z = number(j["z"], "detector.z");
    if (j.contains("side")) {
        const std::string s = string(j["side"], "detector.side");
        if (s == "+z")
            d.side = DetectorSide::positive;
        else if (s == "-z")
            d.side = DetectorSide::negative;
        else
            throw ConfigError(fmt::format("detector.side must be '+z' or '-z', got '{}'", s));
    }
    if (j.contains("t_start")) d.t_start = number(j["t_start"], "detector.t_start");
    if (j.contains("t_end")) d.t_end = number(j["t_end"], "detector.t_end");
    if (j.contains("samples")) d.samples = integer(j["samples"], "detector.samples");
    if (d.samples < 2 || !(d.t_end > d.t_start))
        throw ConfigError("detector needs t_end > t_start and samples >= 2");
    return d;
}

SolverConfig parse_solver(const Json& j) {
    check_keys(j, {"box", "degeneracy_tolerance", "initial_segments", "max_phase_step"}, "solver");
    SolverConfig s;
    if (j.contains("box")) {
        const Json& b = j["box"];
        if (!b.is_array() || b.size() != 4) throw ConfigError("solver.box must be [re_min, re_max, im_min, im_max]");
        SearchBox box{number(b[0], "solver.box[0]"), number(b[1], "solver.box[1]"), number(b[2], "solver.box[2]"),
                      number(b[3], "solver.box[3]")};
        if (!(box.width() > 0.0) || !(box.height() > 0.0)) throw ConfigError("solver.box has no interior");
        if (box.re_min <= 0.0 && box.re_max >= 0.0 && box.im_min <= 0.0 && box.im_max >= 0.0)
            throw ConfigError("solver.box must exclude omega = 0");
        s.box = box;
    }
    if (j.contains("degeneracy_tolerance"))
        s.degeneracy_tolerance = number(j["degeneracy_tolerance"], "solver.degeneracy_tolerance");
    if (j.contains("initial_segments")) s.initial_segments = integer(j["initial_segments"], "solver.initial_segments");
    if (j.contains("max_phase_step")) s.max_phase_step = number(j["max_phase_step"], "solver.max_phase_step");
    if (s.initial_segments < 1 || !(s.max_phase_step > 0.0) || !(s.max_phase_step < 3.0) ||
        !(s.degeneracy_tolerance > 0.0))
        throw ConfigError("solver tolerances out of range");
    return s;
}

OracleConfig parse_oracle(const Json& j) {
    check_keys(j, {"box_length", "q_max", "dt", "two_photon", "counter_rotating", "g", "delta0", "z"}, "oracle");
    OracleConfig o;
    if (j.contains("box_length")) o.box_length = number(j["box_length"], "oracle.box_length");
    if (j.contains("q_max")) o.q_max = number(j["q_max"], "oracle.q_max");
    if (j.contains("dt")) o.dt = number(j["dt"], "oracle.dt");
    if (j.contains("two_photon")) o.two_photon = boolean(j["two_photon"], "oracle.two_photon");
    if (j.contains("counter_rotating")) o.counter_rotating = boolean(j["counter_rotating"], "oracle.counter_rotating");
    if (j.contains("g")) o.g = number(j["g"], "oracle.g");
    if (j.contains("delta0")) o.delta0 = number(j["delta0"], "oracle.delta0");
    if (j.contains("z")) o.z = number(j["z"], "oracle.z");
    if (!(o.g > 0.0) || !(o.delta0 > 0.0) || !(o.q_max > 0.0) || !(o.z > 0.0))
        throw ConfigError("oracle g, delta0, q_max and z must be positive");
    return o;
}

SweepConfig parse_sweep(const Json& j) {
    check_keys(j, {"parameter", "values"}, "sweep");
    SweepConfig s;
    if (j.contains("parameter")) s.parameter = string(j["parameter"], "sweep.parameter");
    if (s.parameter != "n_layers" && s.parameter != "g" && s.parameter != "delta0")
        throw ConfigError(fmt::format("sweep.parameter must be n_layers, g or delta0, got '{}'", s.parameter));
    if (j.contains("values")) {
        if (!j["values"].is_array()) throw ConfigError("sweep.values must be an array");
        for (const auto& v : j["values"]) s.values.push_back(number(v, "sweep.values[]"));
    }
    return s;
}

OutputConfig parse_output(const Json& j) {
    check_keys(j, {"format", "path"}, "output");
    OutputConfig o;
    if (j.contains("format")) o.format = string(j["format"], "output.format");
    if (o.format != "csv" && o.format != "json")
        throw ConfigError(fmt::format("output.format must be csv or json, got '{}'", o.format));
    if (j.contains("path")) o.path = string(j["path"], "output.path");
    return o;
}

}  // namespace

ExcitonMoments StateConfig::moments(int n_layers) const {
    if (kind == "vacuum") return ExcitonMoments::vacuum(n_layers);
    if (kind == "coherent") return moments_from_state_spec(CoherentSpec{basis, amplitudes}, n_layers);
    if (kind == "fock") return moments_from_state_spec(FockSpec{basis, occupations}, n_layers);
    if (kind == "chaotic") return moments_from_state_spec(ChaoticSpec{basis, mean_occupations}, n_layers);
    ExcitonMoments m = ExcitonMoments::vacuum(n_layers);
    if (!mean.empty()) {
        if (static_cast<int>(mean.size()) != n_layers) throw ConfigError(fmt::format("state.mean needs {} entries", n_layers));
        for (int i = 0; i < n_layers; ++i) m.mean(i) = mean[i];
    }
    m.normal = to_matrix(normal, n_layers, "normal");
    m.anomalous = to_matrix(anomalous, n_layers, "anomalous");
    return moments_from_state_spec(RawMomentsSpec{basis, m}, n_layers);
}

DetectorSpec DetectorConfig::spec() const { return {z, uniform_times(t_start, t_end, samples), side}; }

SolverOptions SolverConfig::options() const {
    SolverOptions o;
    o.degeneracy_tolerance = degeneracy_tolerance;
    o.contour.initial_segments = initial_segments;
    o.contour.max_phase_step = max_phase_step;
    return o;
}

RunConfig parse_config(const Json& j) {
    check_keys(j, {"params", "state", "detector", "solver", "oracle", "sweep", "output"}, "config");
    if (!j.contains("params")) throw ConfigError("config needs a params section");
    RunConfig c;
    try {
        c.params = parse_params(j["params"]);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("state")) c.state = parse_state(j["state"]);
    if (j.contains("detector")) c.detector = parse_detector(j["detector"]);
    if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
    if (j.contains("oracle")) c.oracle = parse_oracle(j["oracle"]);
    if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"]);
    if (j.contains("output")) c.output = parse_output(j["output"]);
    return c;
}

Json to_json(const RunConfig& c) {
    Json j;
    Json p;
    p["n_layers"] = c.params.n_layers;
    p["delta0"] = c.params.delta0;
    p["g"] = c.params.g;
    if (c.params.physical) {
        const auto& u = *c.params.physical;
        Json pu;
        pu["omega"] = u.omega;
        pu["a"] = u.a;
        pu["d"] = u.d;
        pu["hbar"] = u.hbar;
        pu["c"] = u.c;
        if (u.area) pu["area"] = *u.area;
        p["physical"] = pu;
    }
    j["params"] = p;

    Json s;
    s["kind"] = c.state.kind;
    s["basis"] = c.state.basis == StateBasis::k ? "k" : "layer";
    if (c.state.kind == "coherent") s["amplitudes"] = complex_vector_json(c.state.amplitudes);
    if (c.state.kind == "fock") s["occupations"] = c.state.occupations;
    if (c.state.kind == "chaotic") s["mean_occupations"] = c.state.mean_occupations;
    if (c.state.kind == "moments") {
        s["mean"] = complex_vector_json(c.state.mean);
        Json n = Json::array(), a = Json::array();
        for (const auto& row : c.state.normal) n.push_back(complex_vector_json(row));
        for (const auto& row : c.state.anomalous) a.push_back(complex_vector_json(row));
        s["normal"] = n;
        s["anomalous"] = a;
    }
    j["state"] = s;

    j["detector"] = {{"z", c.detector.z},
                     {"side", c.detector.side == DetectorSide::positive ? "+z" : "-z"},
                     {"t_start", c.detector.t_start},
                     {"t_end", c.detector.t_end},
                     {"samples", c.detector.samples}};

    Json sv;
    if (c.solver.box) {
        const auto& b = *c.solver.box;
        sv["box"] = {b.re_min, b.re_max, b.im_min, b.im_max};
    }
    sv["degeneracy_tolerance"] = c.solver.degeneracy_tolerance;
    sv["initial_segments"] = c.solver.initial_segments;
    sv["max_phase_step"] = c.solver.max_phase_step;
    j["solver"] = sv;

    Json o;
    if (c.oracle.box_length) o["box_length"] = *c.oracle.box_length;
    o["q_max"] = c.oracle.q_max;
    if (c.oracle.dt) o["dt"] = *c.oracle.dt;
    o["two_photon"] = c.oracle.two_photon;
    o["counter_rotating"] = c.oracle.counter_rotating;
    o["g"] = c.oracle.g;
    o["delta0"] = c.oracle.delta0;
    o["z"] = c.oracle.z;
    j["oracle"] = o;

    j["sweep"] = {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
    j["output"] = {{"format", c.output.format}, {"path", c.output.path}};
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
    }
    return parse_config(j);
}

std::string config_hash(const RunConfig& c) {
    Json canonical = to_json(c);
    canonical["output"].erase("path");
    const std::string text = canonical.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace slabrad

#include "doctest.h"

#include <cmath>
#include <sstream>

#include "slabrad/commands.hpp"

using namespace slabrad;

namespace {

RunConfig parse(const char* text) { return parse_config(Json::parse(text)); }

const char* kN2 = R"({
  "params": {"n_layers": 2, "delta0": 0.01, "g": 1e-4},
  "state": {"kind": "coherent", "basis": "layer", "amplitudes": [[1, 0], [0, 0.5]]},
  "detector": {"z": 1.0, "t_end": 3e4, "samples": 61},
  "solver": {"degeneracy_tolerance": 1e-9},
  "oracle": {"q_max": 30}
})";

}  // namespace

TEST_CASE("parse and serialize round trip is lossless") {
    const RunConfig a = parse(kN2);
    const Json j = to_json(a);
    const RunConfig b = parse_config(j);
    CHECK(to_json(b) == j);
    CHECK(config_hash(a) == config_hash(b));
    CHECK(a.state.amplitudes[1] == cplx(0.0, 0.5));
    CHECK(a.oracle.q_max == 30.0);
    CHECK(a.solver.degeneracy_tolerance == 1e-9);
}

TEST_CASE("physical parameters survive the round trip") {
    const RunConfig a = parse(R"({"params": {"n_layers": 2, "physical":
        {"omega": 3e15, "a": 1e-7, "d": 1e-18, "hbar": 1.0546e-27, "c": 2.9979e10, "area": 1e-8}}})");
    REQUIRE(a.params.physical);
    CHECK(a.params.delta0 == doctest::Approx(3e15 * 1e-7 / 2.9979e10));
    const RunConfig b = parse_config(to_json(a));
    CHECK(b.params.g == a.params.g);
    CHECK(*b.params.physical->area == 1e-8);
}

TEST_CASE("hash changes with any value") {
    RunConfig a = parse(kN2);
    const std::string h = config_hash(a);
    CHECK(h.size() == 64);
    a.params.g *= 1.0 + 1e-15;
    CHECK(config_hash(a) != h);
}

TEST_CASE("unknown keys and bad values are config errors") {
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 2, "delta0": 0.01, "g": 1e-4}, "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 2, "delta0": 0.01, "g": 1e-4, "G": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 2, "delta0": 0.01}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 2.5, "delta0": 0.01, "g": 1e-4}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 2, "delta0": -1, "g": 1e-4}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 1, "delta0": 0.1, "g": 0.1},
                              "state": {"kind": "fock", "amplitudes": [1]}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 1, "delta0": 0.1, "g": 0.1}, "detector": {"side": "up"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse(R"({"params": {"n_layers": 1, "delta0": 0.1, "g": 0.1}, "solver": {"box": [-1, 1, -1, 1]}})"),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("modes command: row counts and monolayer rate") {
    RunConfig c = parse(R"({"params": {"n_layers": 1, "delta0": 0.01, "g": 1e-3}})");
    CommandOutput out = cmd_modes(c);
    CHECK(out.status == 0);
    REQUIRE(out.table.rows.size() == 2);
    CHECK(std::get<double>(out.table.rows[0][2]) == doctest::Approx(0.5e-3).epsilon(1e-12));

    c.params.n_layers = 2;
    out = cmd_modes(c);
    CHECK(out.table.rows.size() == 4);
    for (const auto& r : out.table.rows) CHECK(std::get<bool>(r[5]));
    c.params.n_layers = 3;
    CHECK(cmd_modes(c).table.rows.size() == 6);
    CHECK(cmd_modes(c, true).meta["seed_only"] == true);
}

TEST_CASE("field command writes t,re_eps,im_eps with zeros before the light cone") {
    const RunConfig c = parse(kN2);
    const CommandOutput out = cmd_field(c);
    CHECK(out.table.columns == std::vector<std::string>{"t", "re_eps", "im_eps"});
    for (const auto& r : out.table.rows)
        if (std::get<double>(r[0]) < 1.0) {
            CHECK(std::get<double>(r[1]) == 0.0);
            CHECK(std::get<double>(r[2]) == 0.0);
        }
    RunConfig inside = c;
    inside.detector.z = 0.001;
    CHECK_THROWS_AS(cmd_field(inside), ConfigError);
}

TEST_CASE("Fock field trace is identically zero") {
    const RunConfig c = parse(R"({"params": {"n_layers": 2, "delta0": 0.01, "g": 1e-4},
        "state": {"kind": "fock", "basis": "layer", "occupations": [1, 0]}})");
    for (const auto& r : cmd_field(c).table.rows) {
        CHECK(std::get<double>(r[1]) == 0.0);
        CHECK(std::get<double>(r[2]) == 0.0);
    }
}

TEST_CASE("flux command lists one column per mode pair") {
    const CommandOutput out = cmd_flux(parse(kN2));
    CHECK(out.table.columns ==
          std::vector<std::string>{"t", "flux_total", "flux_comp_1", "flux_comp_2", "flux_comp_3"});
    CHECK(out.meta["components"].size() == 3);
}

TEST_CASE("sweeps reproduce the scaling laws") {
    RunConfig c = parse(R"({"params": {"n_layers": 1, "delta0": 0.01, "g": 1e-4},
        "sweep": {"parameter": "n_layers", "values": [1, 2, 3]}})");
    const CommandOutput n = cmd_sweep(c);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::get<double>(n.table.rows[i][3]) == doctest::Approx(double(i + 1)).epsilon(1e-2));

    c = parse(R"({"params": {"n_layers": 2, "delta0": 0.01, "g": 1e-5},
        "sweep": {"parameter": "delta0", "values": [0.005, 0.01, 0.02]}})");
    CHECK(cmd_sweep(c).meta["slope_gamma_sub"].get<double>() == doctest::Approx(2.0).epsilon(0.025));
    c = parse(R"({"params": {"n_layers": 2, "delta0": 0.01, "g": 1e-4},
        "sweep": {"parameter": "g", "values": [1e-5, 1e-4, 1e-3]}})");
    CHECK(cmd_sweep(c).meta["slope_gamma_super"].get<double>() == doctest::Approx(1.0).epsilon(0.02));
    c.sweep.values.clear();
    CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
}

TEST_CASE("coarse bath fails validation with an actionable message") {
    RunConfig c = parse(R"({"params": {"n_layers": 1, "delta0": 0.01, "g": 1e-4}, "oracle": {"dt": 0.01}})");
    const auto checks = validation_checks(c);
    const auto it = std::find_if(checks.begin(), checks.end(), [](const Check& k) { return k.name == "oracle_bath"; });
    REQUIRE(it != checks.end());
    CHECK_FALSE(it->passed);
    CHECK(it->message.find("reduce dt") != std::string::npos);
    CHECK(cmd_validate(c).status == 1);
}

TEST_CASE("CSV numbers round trip at 17 significant digits") {
    CommandOutput out;
    out.table.columns = {"x", "label"};
    const double x = 0.1 + 0.2;
    out.table.rows.push_back({x, std::string("a,b")});
    std::ostringstream os;
    write_table(os, out, "csv");
    std::istringstream is(os.str());
    std::string header, line;
    std::getline(is, header);
    std::getline(is, line);
    CHECK(header == "x,label");
    CHECK(std::stod(line.substr(0, line.find(','))) == x);
    CHECK(line.substr(line.find(',') + 1) == "\"a,b\"");
}

TEST_CASE("identical configs give byte-identical output") {
    const RunConfig c = parse(kN2);
    std::ostringstream a, b;
    write_table(a, cmd_flux(c), "csv");
    write_table(b, cmd_flux(c), "csv");
    CHECK(a.str() == b.str());
    const Json s = sidecar(cmd_flux(c), c);
    CHECK(s["config_hash"] == config_hash(c));
    CHECK(s["unit_scales"].is_null());
}

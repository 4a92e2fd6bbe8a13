// config.hpp: JSON run configuration with a strict schema

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "slabrad/contour.hpp"
#include "slabrad/dynamics.hpp"
#include "slabrad/model.hpp"
#include "slabrad/oracle.hpp"
#include "slabrad/spectrum.hpp"

namespace slabrad {

using Json = nlohmann::ordered_json;

struct StateConfig {
    std::string kind = "vacuum";  // vacuum | coherent | fock | chaotic | moments
    StateBasis basis = StateBasis::k;
    std::vector<cplx> amplitudes;
    std::vector<int> occupations;
    std::vector<double> mean_occupations;
    std::vector<cplx> mean;
    std::vector<std::vector<cplx>> normal;
    std::vector<std::vector<cplx>> anomalous;

    ExcitonMoments moments(int n_layers) const;
};

struct DetectorConfig {
    double z = 1.0;
    DetectorSide side = DetectorSide::positive;
    double t_start = 0.0;
    double t_end = 10.0;
    int samples = 1001;

    DetectorSpec spec() const;
};

struct SolverConfig {
    std::optional<SearchBox> box;
    double degeneracy_tolerance = 1e-8;
    int initial_segments = 16;
    double max_phase_step = 0.5;

    SolverOptions options() const;
};

struct OracleConfig {
    std::optional<double> box_length;
    double q_max = 40.0;
    std::optional<double> dt;
    bool two_photon = true;
    bool counter_rotating = true;
    double g = 0.1;
    double delta0 = 0.1;
    double z = 2.0;
};

struct SweepConfig {
    std::string parameter = "n_layers";  // n_layers | g | delta0
    std::vector<double> values;
};

struct OutputConfig {
    std::string format = "csv";  // csv | json
    std::string path;
};

struct RunConfig {
    SlabParams params;
    StateConfig state;
    DetectorConfig detector;
    SolverConfig solver;
    OracleConfig oracle;
    SweepConfig sweep;
    OutputConfig output;
};

/// Throws ConfigError on unknown keys, wrong types, or invalid values.
RunConfig parse_config(const Json& j);
Json to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

/// SHA-256 (hex) of the canonical serialization of the parsed config.
std::string config_hash(const RunConfig& c);

}  // namespace slabrad

// commands.hpp: the subcommands behind the slabrad executable

#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "slabrad/config.hpp"

namespace slabrad {

using Cell = std::variant<double, long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct CommandOutput {
    std::string command;
    Table table;
    Json meta = Json::object();  // merged into the sidecar
    int status = 0;              // 0 ok, 1 check failed
    std::vector<std::string> diagnostics;
};

struct Check {
    std::string name;
    bool passed = false;
    bool skipped = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string message;
};

CommandOutput cmd_modes(const RunConfig& cfg, bool seed_only = false);
CommandOutput cmd_field(const RunConfig& cfg, bool seed_only = false);
CommandOutput cmd_flux(const RunConfig& cfg, bool seed_only = false);
CommandOutput cmd_sweep(const RunConfig& cfg, bool seed_only = false);
CommandOutput cmd_validate(const RunConfig& cfg);

std::vector<Check> validation_checks(const RunConfig& cfg);

/// Oracle field against 2 Re eps for a coherent state with k-basis mean `mu`.
struct OracleComparison {
    double relative_l2 = 0.0;      // over tau in [0, t_span]
    double precone_ratio = 0.0;    // max |E| before the light cone (less a 20/q_max margin) / peak
    double analytic_precone = 0.0; // max |eps| before the light cone
    double energy_drift = 0.0;     // max relative change of the oracle energy
    double runtime = 0.0;          // seconds
};
OracleComparison compare_oracle(const SlabParams& params, const BathConfig& bath, const CVector& mu, double z,
                                double t_span);

/// Decay rate fitted to one named flux component ("a|b"), sampled over three of its e-folding times.
double fitted_component_rate(const EigenModeSet& modes, const ExcitonMoments& moments, const SlabParams& params,
                             const std::string& label);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Serializes as CSV (17 significant digits) or JSON; the JSON form embeds `meta`.
void write_table(std::ostream& os, const CommandOutput& out, const std::string& format);
/// Sidecar with the config hash, units and unit-restoration factors.
Json sidecar(const CommandOutput& out, const RunConfig& cfg);

}  // namespace slabrad

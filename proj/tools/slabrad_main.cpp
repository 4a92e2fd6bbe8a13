// slabrad: collective emission of multilayer exciton slabs

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "slabrad/commands.hpp"

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out_path,
        const std::string& format_flag, bool seed_only) {
    using namespace slabrad;
    RunConfig cfg = load_config(config_path);
    if (!out_path.empty()) cfg.output.path = out_path;
    if (!format_flag.empty()) cfg.output.format = format_flag;

    CommandOutput out;
    if (command == "modes")
        out = cmd_modes(cfg, seed_only);
    else if (command == "field")
        out = cmd_field(cfg, seed_only);
    else if (command == "flux")
        out = cmd_flux(cfg, seed_only);
    else if (command == "sweep")
        out = cmd_sweep(cfg, seed_only);
    else
        out = cmd_validate(cfg);

    for (const auto& d : out.diagnostics) std::cerr << "slabrad: " << d << '\n';
    if (cfg.output.path.empty()) {
        write_table(std::cout, out, cfg.output.format);
    } else {
        std::ofstream f(cfg.output.path);
        if (!f) throw ConfigError("cannot write " + cfg.output.path);
        write_table(f, out, cfg.output.format);
        std::ofstream meta(cfg.output.path + ".meta.json");
        meta << sidecar(out, cfg).dump(2) << '\n';
    }
    return out.status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact collective emission modes, fields and fluxes of N-layer exciton slabs"};
    app.require_subcommand(1);
    std::string config_path, out_path, format;
    bool seed_only = false;
    for (const char* name : {"modes", "field", "flux", "sweep", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output file (stdout if omitted); a .meta.json sidecar is written next to it");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        if (std::string(name) != "validate")
            sub->add_flag("--seed-only", seed_only, "skip certification and use the closed-form roots");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config_path, out_path, format, seed_only);
    } catch (const slabrad::ConfigError& e) {
        std::cerr << "slabrad: config error: " << e.what() << '\n';
        return 2;
    } catch (const slabrad::InvalidParameter& e) {
        std::cerr << "slabrad: invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const slabrad::Error& e) {
        std::cerr << "slabrad: " << e.what() << '\n';
        return 1;
    }
}

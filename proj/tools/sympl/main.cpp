#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "sympl/errors.hpp"

using namespace sympl::cli;

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("sympl");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("SYMPL_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

int report(const std::string& code, const std::string& message, int exit_code) {
    json e = json::object();
    e["error"] = {{"code", code}, {"message", message}, {"exit_code", exit_code}};
    std::cout << e.dump(2) << "\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"sympl: symplectic toolkit for Gaussian and discrete quantum systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("sympl 0.1.0"));

    RunOptions opt;
    std::string format;
    std::uint64_t seed = 0;
    double tol = 0;

    using Handler = std::function<Output(Config&, const RunOptions&)>;
    struct Sub {
        const char* name;
        const char* help;
        Handler fn;
        Format default_format;
        bool csv;
    };
    const std::vector<Sub> subs = {
        {"fidelity-sweep", "average fidelity of adaptive and direct transduction", cmd_fidelity_sweep, Format::Csv, true},
        {"ep-fisher", "Fisher information near an exceptional point", cmd_ep_fisher, Format::Csv, true},
        {"permute-plan", "local symplectic schedule for a mode permutation", cmd_permute_plan, Format::Json, false},
        {"scatter", "input-output scattering matrix", cmd_scatter, Format::Json, false},
        {"dv-teleport", "discrete teleportation transform and feedforward", cmd_dv_teleport, Format::Json, true},
        {"dilate", "symplectic dilation of a Gaussian channel", cmd_dilate, Format::Json, false},
    };
    std::map<CLI::App*, const Sub*> lookup;
    for (const auto& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        sc->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
        sc->add_option("--out", opt.out_path, "output file (default stdout)");
        sc->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sc->add_option("--seed", seed, "seed for randomized inputs");
        sc->add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);
        if (std::string(s.name) == "ep-fisher") sc->add_option("--summary", opt.summary_path, "slope summary JSON path");
        lookup[sc] = &s;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const Sub& sub = *lookup.at(chosen);
    if (chosen->count("--seed")) opt.seed = seed;
    if (chosen->count("--tol")) opt.tol = tol;
    opt.format_given = !format.empty();
    opt.format = format.empty() ? sub.default_format : (format == "csv" ? Format::Csv : Format::Json);

    try {
        if (opt.format == Format::Csv && !sub.csv)
            throw UsageError("UnsupportedFormat", std::string(sub.name) + " only emits json");
        Config cfg = load_config(opt.config_path);
        spdlog::info("{}: config '{}'", sub.name, opt.config_path);
        Output out = sub.fn(cfg, opt);
        if (!out.summary.empty()) {
            std::string path = opt.summary_path;
            if (path.empty() && !opt.out_path.empty() && opt.out_path != "-") path = opt.out_path + ".summary.json";
            if (path.empty()) std::cerr << out.summary;
            else write_output(path, out.summary);
        }
        write_output(opt.out_path, out.body);
    } catch (const UsageError& e) {
        return report(e.code(), e.what(), 1);
    } catch (const sympl::Error& e) {
        return report(e.code(), e.what(), 2);
    } catch (const std::exception& e) {
        return report("Internal", e.what(), 2);
    }
    return 0;
}

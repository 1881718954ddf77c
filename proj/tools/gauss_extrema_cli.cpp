#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gauss_extrema/gauss_extrema.h"

namespace {

int exit_code(gx_status s) {
    switch (s) {
        case GX_OK: return 0;
        case GX_ERR_CONFIG: return 2;
        case GX_ERR_INFEASIBLE: return 3;
        default: return 1;
    }
}

struct Args {
    std::string config;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

int run(const std::string& kind, const Args& args) {
    gx_context* ctx = nullptr;
    if (gx_context_create(&ctx) != GX_OK) return 1;

    gx_overrides ov{};
    ov.kind = kind.c_str();
    if (args.seed) {
        ov.has_seed = 1;
        ov.seed = *args.seed;
    }
    if (args.workers) {
        ov.has_workers = 1;
        ov.workers = *args.workers;
    }
    ov.out_path = args.out.empty() ? nullptr : args.out.c_str();
    ov.format = args.format.empty() ? nullptr : args.format.c_str();

    gx_report* report = nullptr;
    gx_status st = gx_run_config_file(ctx, args.config.c_str(), &ov, &report);
    if (st != GX_OK) {
        std::cerr << "gauss_extrema " << kind << ": " << gx_status_name(st) << ": " << gx_last_error(ctx) << "\n";
        gx_context_destroy(ctx);
        return exit_code(st);
    }
    for (std::size_t i = 0; i < gx_report_note_count(report); ++i) std::cerr << "note: " << gx_report_note(report, i) << "\n";

    const std::string path = gx_report_out_path(report);
    if (path.empty()) {
        std::fputs(gx_report_render(report), stdout);
    } else {
        st = gx_report_write(ctx, report, nullptr);
        if (st != GX_OK) std::cerr << "gauss_extrema " << kind << ": " << gx_last_error(ctx) << "\n";
    }
    gx_report_destroy(report);
    gx_context_destroy(ctx);
    return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian extremes: asymptotic formulas and Monte Carlo checks"};
    app.require_subcommand(1);

    Args args;
    std::string chosen;
    for (const char* kind : {"asym", "simulate", "compare", "pickands", "regen"}) {
        auto* sub = app.add_subcommand(kind, std::string("run a '") + kind + "' experiment config");
        sub->add_option("--config", args.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output file; default from the config, else stdout");
        sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", args.seed, "root seed override");
        sub->add_option("--workers", args.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return run(chosen, args);
}

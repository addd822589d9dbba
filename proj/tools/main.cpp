#include <iostream>

#include <CLI11.hpp>

#include "wander/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Build and check finite stages of an entire map with a wandering domain"};
    app.require_subcommand(1);
    wander::RunConfig rc;

    auto* build = app.add_subcommand("build", "run the staged construction and write a manifest");
    build->add_option("--config", rc.config_path, "JSON configuration")->check(CLI::ExistingFile);
    build->add_option("--out", rc.out_dir, "output directory");
    build->add_option("--lambda", rc.lambda, "density parameter in [0, 1]");
    build->add_option("--stages", rc.stages, "number of stages after stage 0");
    build->add_flag("--quiet", rc.quiet, "no progress on stderr");

    auto* verify = app.add_subcommand("verify", "recompute every verdict from a manifest");
    verify->add_option("--manifest", rc.manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
    verify->add_option("--out", rc.out_dir, "directory for verify_report.json");

    double x = 0, y = 0;
    auto* orbit = app.add_subcommand("orbit", "print a labelled orbit as CSV");
    orbit->add_option("--manifest", rc.manifest_path)->required()->check(CLI::ExistingFile);
    auto* ox = orbit->add_option("--x", x, "real part of the seed");
    orbit->add_option("--y", y, "imaginary part of the seed")->needs(ox);
    orbit->add_option("--steps", rc.steps);

    auto* density = app.add_subcommand("density", "tabulate the visit density of a schedule");
    density->add_option("--lambda", rc.lambda);
    density->add_option("--config", rc.config_path)->check(CLI::ExistingFile);
    density->add_option("--k", rc.k, "horizon");
    density->add_option("--shift", rc.shift, "shift C of the schedule");

    auto* render = app.add_subcommand("render", "write a P6 image of orbit classes");
    render->add_option("--manifest", rc.manifest_path)->required()->check(CLI::ExistingFile);
    render->add_option("--out", rc.out_dir);
    render->add_option("--x0", rc.view.x0);
    render->add_option("--x1", rc.view.x1);
    render->add_option("--y0", rc.view.y0);
    render->add_option("--y1", rc.view.y1);
    render->add_option("--width", rc.width);
    render->add_option("--height", rc.height);
    render->add_option("--budget", rc.budget, "iteration budget per pixel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    rc.mode = app.get_subcommands().front()->get_name();
    if (ox->count() > 0) rc.seed = wander::cplx(x, y);
    return wander::run(rc, std::cout, std::cerr);
}

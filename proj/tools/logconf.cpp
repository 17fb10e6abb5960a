#include "logconf/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Steady Oldroyd-B flow in the log-conformation formulation"};
    app.require_subcommand(1);

    logconf::RunOptions opt;
    app.add_option("--threads", opt.threads, "Assembly threads")->check(CLI::PositiveNumber);
    app.add_option("--output", opt.output, "Output directory");
    app.add_flag("--resume", opt.resume, "Continue from the last matching checkpoint");

    std::string config, suite, checkpoint, what;
    auto* solve = app.add_subcommand("solve", "Run a continuation sweep in Wi");
    solve->add_option("config", config, "Configuration file")->required();
    auto* verify = app.add_subcommand("verify", "Run a self-check suite");
    verify->add_option("suite", suite, "kernels, jacobian or newtonian")->required();
    auto* post = app.add_subcommand("postprocess", "Derive a quantity from a checkpoint");
    post->add_option("checkpoint", checkpoint, "Checkpoint file")->required();
    post->add_option("what", what, "drag, wake, vortex, maxima, slopes, centerline, corner or centre")->required();
    // global flags are also accepted after the subcommand
    for (auto* sub : {solve, verify, post}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : logconf::kExitConfig;
    }

    if (*solve) return logconf::run_solve(config, opt, std::cout);
    if (*verify) return logconf::run_verify(suite, opt, std::cout);
    return logconf::run_postprocess(checkpoint, what, opt, std::cout);
}

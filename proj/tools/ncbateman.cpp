#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include <ncbateman/cli.hpp>

int main(int argc, char** argv)
{
    namespace cli = ncbateman::cli;
    CLI::App app{"Noncommutative Bateman oscillator: spectra, duality, simulation and self-verification"};
    app.require_subcommand(1, 1);

    cli::Options opt;
    std::string format;
    std::uint64_t seed = 0;
    double tol = 0.0;

    const std::map<std::string, std::string> commands{
        {"derive", "print derived parameters, gamma_R, theta* and the damping regime"},
        {"spectrum", "characteristic frequencies by both routes and their agreement"},
        {"simulate", "propagate a model variant and emit the trajectory as CSV"},
        {"sweep", "evaluate a parameter grid and emit one CSV row per point"},
        {"verify", "run every invariant check and emit a JSON verdict"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_path, "write the artifact here instead of stdout");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--plot", opt.plot_path, "SVG plot of u1, u2 against t (simulate)");
        sub->add_option("--seed", seed, "seed for randomized sweeps");
        sub->add_option("--tol", tol, "agreement tolerance override");
        sub->callback([&opt, name = name] { opt.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::usage_error;
    }

    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--format")) opt.format = format == "csv" ? cli::Format::csv : cli::Format::json;
        if (sub->count("--seed")) opt.seed = seed;
        if (sub->count("--tol")) opt.tol = tol;
    }
    return cli::run(opt, std::cout, std::cerr);
}

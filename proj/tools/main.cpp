#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
    CLI::App app{"Spectral PDE solver with learned corrections"};
    app.require_subcommand(1);

    app.add_subcommand("generate", "Generate a trajectory dataset");
    app.add_subcommand("train", "Train a correction model");
    app.add_subcommand("evaluate", "Evaluate models against ground truth");
    app.add_subcommand("plot", "Render plots from results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    std::fprintf(stderr, "not implemented yet\n");
    return 1;
}

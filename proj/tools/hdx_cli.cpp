// Command-line driver. Subcommands: johnson, grassmann, cayley, cob,
// selftest. Exit codes: 0 ok, 1 assertion failed, 2 usage error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hdx/report.hpp"
#include "hdx/spectral.hpp"

namespace {

int run_selftest() {
    int failures = 0;
    const auto check = [&](bool ok, const char* what) {
        std::printf("selftest %-40s %s\n", what, ok ? "ok" : "FAIL");
        if (!ok) ++failures;
    };
    const auto near = [](double a, double b) { return std::abs(a - b) < 1e-9; };

    check(near(hdx::second_eigenvalue(hdx::WeightedGraph::complete(4)).lambda,
               1.0 / 3.0),
          "complete graph eigenvalue");
    check(near(hdx::second_eigenvalue(hdx::WeightedGraph::complete_with_loops(5))
                   .lambda,
               0.0),
          "self-loop graph eigenvalue");
    const auto dc = hdx::double_cover(hdx::WeightedGraph::complete(3));
    check(near(hdx::bipartite_second_singular(dc).lambda, 0.5),
          "double cover singular value");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"construction and certification of Cayley expanders over F_2^n"};
    app.require_subcommand(1);

    auto* johnson = app.add_subcommand("johnson", "Johnson complexes");
    auto* grassmann = app.add_subcommand("grassmann", "Grassmann posets");
    auto* cayley = app.add_subcommand("cayley", "Cayley complexes");
    auto* cob = app.add_subcommand("cob", "coboundary expansion");
    auto* selftest = app.add_subcommand("selftest", "quick health checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (selftest->parsed()) return run_selftest();
        if (johnson->parsed() || grassmann->parsed() || cayley->parsed() ||
            cob->parsed()) {
            std::fprintf(stderr, "subcommand not wired yet\n");
            return 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

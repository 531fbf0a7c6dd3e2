#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "hdx/f2.hpp"
#include "hdx/report.hpp"
#include "hdx/spectral.hpp"

using namespace hdx;
using Catch::Approx;

namespace {

WeightedGraph random_connected_graph(std::mt19937_64& rng, std::size_t n) {
    WeightedGraph g(n);
    for (std::size_t v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t k = 0; k < 2 * n; ++k) {
        std::size_t u = pick(rng), v = pick(rng);
        if (u != v) g.add_edge(u, v, 1.0 + (rng() % 3));
    }
    return g;
}

// Incidence of 1- and 2-dimensional subspaces of F_2^3 under uniform flags.
BipartiteGraph line_plane_incidence() {
    BipartiteGraph b;
    for (u64 v = 1; v < 8; ++v) b.add_left("line" + std::to_string(v));
    for (u64 a = 1; a < 8; ++a) b.add_right("plane" + std::to_string(a));
    for (u64 v = 1; v < 8; ++v)
        for (u64 a = 1; a < 8; ++a)
            if ((std::popcount(v & a) & 1) == 0) b.add_edge(v - 1, a - 1, 1.0);
    return b;
}

}  // namespace

TEST_CASE("complete graph eigenvalues", "[spectral]") {
    for (std::size_t m = 2; m <= 8; ++m) {
        auto rep = second_eigenvalue(WeightedGraph::complete(m));
        CHECK(rep.connected);
        CHECK(rep.method == "dense");
        CHECK(rep.lambda == Approx(1.0 / double(m - 1)).margin(1e-9));
    }
    for (std::size_t m : {3, 5, 9}) {
        auto rep = second_eigenvalue(WeightedGraph::complete_with_loops(m));
        CHECK(rep.lambda == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("cycle eigenvalues", "[spectral]") {
    for (std::size_t m = 4; m <= 9; ++m) {
        double expect = 0.0;
        for (std::size_t k = 1; k < m; ++k)
            expect = std::max(expect,
                              std::abs(std::cos(2 * std::numbers::pi *
                                                double(k) / double(m))));
        auto rep = second_eigenvalue(WeightedGraph::cycle(m));
        CHECK(rep.lambda == Approx(expect).margin(1e-9));
    }
}

TEST_CASE("disconnected and degenerate inputs", "[spectral]") {
    WeightedGraph g(4);
    g.add_edge(0, 1, 1.0);
    g.add_edge(2, 3, 1.0);
    auto rep = second_eigenvalue(g);
    CHECK(rep.lambda == 1.0);
    CHECK_FALSE(rep.connected);
    CHECK(rep.method == "disconnected");

    WeightedGraph isolated(3);
    isolated.add_edge(0, 1, 1.0);
    CHECK_FALSE(second_eigenvalue(isolated).connected);

    CHECK_THROWS_AS(second_eigenvalue(WeightedGraph(0)), std::invalid_argument);
    CHECK_THROWS_AS(second_eigenvalue(WeightedGraph(3)), std::invalid_argument);
}

TEST_CASE("walk is reversible for the derived measure", "[spectral]") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 10; ++rep) {
        WeightedGraph g = random_connected_graph(rng, 20);
        const auto mu = g.measure();
        const auto p = walk_matrix(g);
        double asym = 0.0;
        for (int u = 0; u < 20; ++u)
            for (int v = 0; v < 20; ++v)
                asym = std::max(asym,
                                std::abs(mu[u] * p(u, v) - mu[v] * p(v, u)));
        CHECK(asym < 1e-12);
    }
}

TEST_CASE("tensor products multiply spectra", "[spectral]") {
    const auto k3 = WeightedGraph::complete(3);
    const auto k4 = WeightedGraph::complete(4);
    const auto c5 = WeightedGraph::cycle(5);

    CHECK(second_eigenvalue(tensor(k3, k4)).lambda == Approx(0.5).margin(1e-9));
    CHECK(second_eigenvalue(tensor(c5, k3)).lambda ==
          Approx(std::cos(std::numbers::pi / 5)).margin(1e-9));
    // A factor with zero expansion leaves lambda unchanged.
    CHECK(second_eigenvalue(tensor(k4, WeightedGraph::complete_with_loops(3)))
              .lambda == Approx(1.0 / 3.0).margin(1e-9));

    // Full multiset law on the conjugated spectra.
    for (auto [g1, g2] : {std::pair{k3, c5}, std::pair{k4, k3}}) {
        auto s1 = dense_spectrum(g1), s2 = dense_spectrum(g2);
        std::vector<double> expect;
        for (double a : s1)
            for (double b : s2) expect.push_back(a * b);
        std::sort(expect.begin(), expect.end());
        auto got = dense_spectrum(tensor(g1, g2));
        std::sort(got.begin(), got.end());
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == Approx(expect[i]).margin(1e-9));
    }
}

TEST_CASE("double cover keeps the expansion", "[spectral]") {
    auto dc3 = double_cover(WeightedGraph::complete(3));
    auto rep = bipartite_second_singular(dc3);
    CHECK(rep.lambda == Approx(0.5).margin(1e-9));

    std::mt19937_64 rng(202);
    for (int i = 0; i < 20; ++i) {
        WeightedGraph g = random_connected_graph(rng, 4 + i % 9);
        const double direct = second_eigenvalue(g).lambda;
        const double covered =
            bipartite_second_singular(double_cover(g)).lambda;
        CHECK(covered == Approx(direct).margin(1e-9));
    }

    // A bipartite input disconnects its double cover.
    WeightedGraph edge(2);
    edge.add_edge(0, 1, 1.0);
    auto cover = double_cover(edge);
    auto flagged = bipartite_second_singular(cover);
    CHECK_FALSE(flagged.connected);
    CHECK(flagged.lambda == 1.0);
}

TEST_CASE("bipartite singular values", "[spectral]") {
    BipartiteGraph complete(3, 4);
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t r = 0; r < 4; ++r) complete.add_edge(l, r, 1.0);
    CHECK(bipartite_second_singular(complete).lambda ==
          Approx(0.0).margin(1e-12));

    // Lines vs planes of F_2^3: 7+7 vertices, 3-regular incidence. The
    // squared operator is (2I + J)/9 on the 7-point side, so the second
    // singular value is sqrt(2)/3.
    auto inc = line_plane_incidence();
    CHECK(inc.edge_count() == 21);
    CHECK(bipartite_second_singular(inc).lambda ==
          Approx(std::sqrt(2.0) / 3.0).margin(1e-9));

    BipartiteGraph disc(2, 2);
    disc.add_edge(0, 0, 1.0);
    disc.add_edge(1, 1, 1.0);
    CHECK_FALSE(bipartite_second_singular(disc).connected);
}

TEST_CASE("l1 distance bounds the eigenvalue gap", "[spectral]") {
    const auto k5 = WeightedGraph::complete(5);
    auto same = l1_closeness_bound(k5, k5);
    CHECK(same.epsilon == Approx(0.0).margin(1e-12));
    CHECK(same.holds);

    // Walk to a uniform non-neighbor on a 12-cycle: every row is uniform
    // over 9 of 12 vertices, so eps = 2 * 3/12 and lambda <= 2p.
    const std::size_t n = 12;
    WeightedGraph a(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t d = 2; d <= n - 2; ++d) {
            std::size_t u = (v + d) % n;
            if (u > v) a.add_edge(v, u, 1.0);
        }
    auto rep = l1_closeness_bound(a, WeightedGraph::complete_with_loops(n));
    CHECK(rep.epsilon == Approx(0.5).margin(1e-12));
    CHECK(rep.holds);
    CHECK(rep.lambda_a <= 0.5 + 1e-9);

    WeightedGraph path(3);
    path.add_edge(0, 1, 1.0);
    path.add_edge(1, 2, 1.0);
    CHECK_THROWS_AS(l1_closeness_bound(path, WeightedGraph::complete(3)),
                    std::invalid_argument);
}

TEST_CASE("decomposition bound certifies", "[spectral]") {
    const auto k5 = WeightedGraph::complete(5);
    LocalDecomposition trivial;
    trivial.parts.push_back({k5, {0, 1, 2, 3, 4}});
    trivial.part_weight = {1.0};
    auto rep = local_to_global_check(k5, trivial);
    CHECK(rep.valid_decomposition);
    CHECK(rep.mixture_error < 1e-12);
    CHECK(rep.lambda2 == Approx(0.0).margin(1e-9));
    CHECK(rep.bound == Approx(0.25).margin(1e-9));
    CHECK(rep.actual == Approx(0.25).margin(1e-9));
    CHECK(rep.holds);

    const auto k6 = WeightedGraph::complete(6);
    LocalDecomposition triangles;
    for (std::size_t x = 0; x < 6; ++x)
        for (std::size_t y = x + 1; y < 6; ++y)
            for (std::size_t z = y + 1; z < 6; ++z) {
                triangles.parts.push_back(
                    {WeightedGraph::complete(3), {x, y, z}});
                triangles.part_weight.push_back(1.0);
            }
    auto rep6 = local_to_global_check(k6, triangles);
    CHECK(rep6.valid_decomposition);
    CHECK(rep6.gamma == Approx(0.5).margin(1e-9));
    CHECK(rep6.actual == Approx(0.2).margin(1e-9));
    CHECK(rep6.holds);

    // Dropping one triangle breaks the mixture.
    LocalDecomposition broken = triangles;
    broken.parts.pop_back();
    broken.part_weight.pop_back();
    auto bad = local_to_global_check(k6, broken);
    CHECK_FALSE(bad.valid_decomposition);
    CHECK(bad.mixture_error > 1e-6);

    CHECK_THROWS_AS(local_to_global_check(k6, LocalDecomposition{}),
                    std::invalid_argument);
}

TEST_CASE("bipartite decomposition bound", "[spectral]") {
    // Split the line/plane incidence into a star per plane. Stars have zero
    // second singular value, the plane-part pairing is a perfect matching,
    // and the bound collapses to the line-part singular value.
    auto inc = line_plane_incidence();
    BipartiteLocalDecomposition tau;
    for (std::size_t p = 0; p < 7; ++p) {
        BipartiteDecompositionPart part;
        std::vector<std::size_t> lines;
        inc.for_each_edge([&](std::size_t l, std::size_t r, double) {
            if (r == p) lines.push_back(l);
        });
        part.graph = BipartiteGraph(lines.size(), 1);
        for (std::size_t i = 0; i < lines.size(); ++i)
            part.graph.add_edge(i, 0, 1.0);
        part.left_to_ambient = lines;
        part.right_to_ambient = {p};
        tau.parts.push_back(std::move(part));
        tau.part_weight.push_back(1.0);
    }
    auto rep = bipartite_local_to_global_check(inc, tau);
    CHECK(rep.valid_decomposition);
    CHECK(rep.gamma == Approx(0.0).margin(1e-9));
    CHECK(rep.actual == Approx(std::sqrt(2.0) / 3.0).margin(1e-9));
    CHECK(rep.holds);
}

TEST_CASE("power iteration matches the dense path", "[spectral]") {
    SolveOptions force;
    force.force_power = true;
    auto k50 = WeightedGraph::complete(50);
    CHECK(second_eigenvalue(k50, force).lambda ==
          Approx(1.0 / 49.0).margin(1e-6));
    CHECK(second_eigenvalue(k50, force).method == "power");

    std::mt19937_64 rng(303);
    WeightedGraph big = random_connected_graph(rng, 1100);
    const double dense = second_eigenvalue(big).lambda;
    const double iterative = second_eigenvalue(big, force).lambda;
    CHECK(iterative == Approx(dense).margin(1e-6));
}

TEST_CASE("dumps and reports are stable", "[spectral]") {
    auto k3 = WeightedGraph::complete(3);
    std::ostringstream os;
    k3.dump_tsv(os);
    const std::string expect =
        "# graph\tn=3\tm=3\n"
        "# vertex\t0\t0\n"
        "# vertex\t1\t1\n"
        "# vertex\t2\t2\n"
        "0\t1\t0.33333333333333331\n"
        "0\t2\t0.33333333333333331\n"
        "1\t2\t0.33333333333333331\n";
    CHECK(os.str() == expect);

    auto rep = second_eigenvalue(k3);
    auto j = spectral_report_json(rep);
    CHECK(j.dump() == j.dump());
    CHECK(j["n"] == 3);
    CHECK(j["m"] == 3);
    CHECK(j["method"] == "dense");

    ReportEnvelope env(ordered_json{{"command", "test"}});
    auto full = env.finish(j);
    CHECK(full.contains("elapsed_seconds"));
    CHECK(without_wall_clock(full)["elapsed_seconds"] == 0.0);
}

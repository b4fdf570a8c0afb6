#include "oracles.hpp"

#include "osc_ising/graph.hpp"
#include "osc_ising/random.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace osc_ising;

namespace {

SpinAssignment random_spins(std::size_t n, Rng &rng) {
    std::vector<Spin> s(n);
    for (auto &x : s) x = uniform_index(rng, 2) ? 1 : -1;
    return SpinAssignment(std::move(s));
}

std::filesystem::path temp_file(const std::string &name, const std::string &contents) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << contents;
    return path;
}

}  // namespace

TEST_CASE("graph constructor canonicalizes and rejects bad edges") {
    const Graph g(3, {{2, 0}, {1, 2}});
    CHECK(g.edges() == std::vector<Edge>{{0, 2}, {1, 2}});
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), GraphError);
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), GraphError);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), GraphError);
}

TEST_CASE("cycle and complete graph helpers") {
    const Graph c4 = Graph::cycle(4);
    CHECK(c4.edge_count() == 4);
    CHECK(c4.degrees() == std::vector<std::size_t>{2, 2, 2, 2});
    const Graph k5 = Graph::complete(5);
    CHECK(k5.edge_count() == 10);
    CHECK(k5.density() == doctest::Approx(1.0));
}

TEST_CASE("cut value on small graphs") {
    const Graph c4 = Graph::cycle(4);
    CHECK(cut_value(c4, SpinAssignment({1, -1, 1, -1})) == 4);
    CHECK(cut_value(c4, SpinAssignment::all_up(4)) == 0);
    CHECK(ising_energy(c4, SpinAssignment::all_up(4)) == 4);
    CHECK(ising_energy(c4, SpinAssignment({1, -1, 1, -1})) == -4);
    CHECK_THROWS_AS(cut_value(c4, SpinAssignment::all_up(3)), std::invalid_argument);
}

TEST_CASE("cut equals half of edges minus energy for random graphs and assignments") {
    Rng rng(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 20);
        const Graph g = gen_random(n, uniform_unit(rng), rng());
        const SpinAssignment a = random_spins(n, rng);
        const auto h = ising_energy(g, a);
        const auto cut = cut_value(g, a);
        REQUIRE(2 * static_cast<std::int64_t>(cut) == static_cast<std::int64_t>(g.edge_count()) - h);
        CHECK(cut_value(g, a.flipped()) == cut);
        CHECK(ising_energy(g, a.flipped()) == h);
    }
}

TEST_CASE("cut value agrees with the bitmask partition count") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 12);
        const Graph g = gen_random(n, 0.5, rng());
        const std::uint64_t mask = uniform_index(rng, std::uint64_t{1} << n);
        CHECK(cut_value(g, oracle::spins_of_mask(n, mask)) == oracle::cut_of_mask(g, mask));
    }
}

TEST_CASE("brute force maxcut on known graphs") {
    CHECK(brute_force_maxcut(Graph::cycle(4)).cut == 4);
    CHECK(brute_force_maxcut(Graph::complete(2)).cut == 1);
    CHECK(brute_force_maxcut(Graph::complete(4)).cut == 4);
    CHECK(brute_force_maxcut(Graph::cycle(5)).cut == 4);
    CHECK(brute_force_maxcut(Graph(3, {})).cut == 0);
}

TEST_CASE("brute force maxcut matches exhaustive enumeration") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 11);
        const Graph g = gen_random(n, uniform_unit(rng), rng());
        const CutResult r = brute_force_maxcut(g);
        CHECK(r.cut == oracle::exhaustive_maxcut(g));
        CHECK(cut_value(g, r.spins) == r.cut);
        CHECK(r.spins[0] == 1);
    }
}

TEST_CASE("brute force maxcut dominates sampled assignments") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4 + uniform_index(rng, 14);
        const Graph g = gen_random(n, uniform_unit(rng), rng());
        const std::size_t best = brute_force_maxcut(g).cut;
        for (int k = 0; k < 100; ++k) CHECK(cut_value(g, random_spins(n, rng)) <= best);
    }
}

TEST_CASE("brute force tie break picks the lexicographically smallest assignment") {
    // The only C4 optimum with spins[0] = +1 alternates.
    CHECK(brute_force_maxcut(Graph::cycle(4)).spins == SpinAssignment({1, -1, 1, -1}));
    // Edgeless graph: every assignment ties; smallest with spins[0] = +1 puts -1 everywhere else.
    CHECK(brute_force_maxcut(Graph(3, {})).spins == SpinAssignment({1, -1, -1}));
    // K3 optima with spins[0] = +1: (+,-,-), (+,-,+), (+,+,-); smallest is (+,-,-).
    CHECK(brute_force_maxcut(Graph::complete(3)).spins == SpinAssignment({1, -1, -1}));
}

TEST_CASE("brute force refuses oversized graphs") {
    CHECK_THROWS_AS(brute_force_maxcut(Graph(kMaxBruteForceNodes + 1, {})), std::invalid_argument);
}

TEST_CASE("random graph generator has the exact edge count and is deterministic") {
    for (std::size_t n : {2u, 5u, 16u, 33u}) {
        for (double eta : {0.0, 0.2, 0.5, 0.8, 1.0}) {
            const Graph g = gen_random(n, eta, 11);
            const double pairs = static_cast<double>(n * (n - 1) / 2);
            CHECK(g.edge_count() == static_cast<std::size_t>(std::llround(eta * pairs)));
            std::set<Edge> seen;
            for (const auto &[u, v] : g.edges()) {
                CHECK(u < v);
                CHECK(v < n);
                CHECK(seen.insert({u, v}).second);
            }
            CHECK(gen_random(n, eta, 11) == g);
        }
    }
    CHECK(gen_random(16, 0.5, 1) != gen_random(16, 0.5, 2));
    CHECK_THROWS_AS(gen_random(4, 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_random(4, -0.1, 1), std::invalid_argument);
}

TEST_CASE("graph files round trip") {
    const Graph g = gen_random(9, 0.4, 3);
    const auto path = std::filesystem::temp_directory_path() / "osc_ising_roundtrip.txt";
    save_graph(g, path);
    CHECK(load_graph(path) == g);
    save_graph(Graph::cycle(4), path);
    CHECK(load_graph(path) == Graph::cycle(4));
    std::filesystem::remove(path);
}

TEST_CASE("graph parser accepts comments and reversed endpoints") {
    const Graph g = parse_graph("# header comment\n3 2\n# edges\n2 0\n1 2\n");
    CHECK(g == Graph(3, {{0, 2}, {1, 2}}));
    CHECK(format_graph(g) == "3 2\n0 2\n1 2\n");
}

TEST_CASE("graph parser rejects malformed files") {
    CHECK_THROWS_AS(load_graph(temp_file("osc_ising_range.txt", "4 1\n4 1\n")), GraphFormatError);
    CHECK_THROWS_AS(load_graph(temp_file("osc_ising_dup.txt", "4 2\n0 1\n0 1\n")), GraphFormatError);
    CHECK_THROWS_AS(parse_graph(""), GraphFormatError);
    CHECK_THROWS_AS(parse_graph("four 1\n0 1\n"), GraphFormatError);
    CHECK_THROWS_AS(parse_graph("4 2\n0 1\n"), GraphFormatError);
    CHECK_THROWS_AS(parse_graph("4 1\n0 1\n1 2\n"), GraphFormatError);
    CHECK_THROWS_AS(parse_graph("4 1\n2 2\n"), GraphFormatError);
    CHECK_THROWS_AS(parse_graph("4 1\n0 1 2\n"), GraphFormatError);
    CHECK_THROWS_AS(load_graph("/nonexistent/osc_ising.txt"), GraphError);
}

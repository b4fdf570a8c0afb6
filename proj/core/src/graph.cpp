#include "osc_ising/graph.hpp"

#include "osc_ising/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace osc_ising {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (auto &[u, v] : edges_) {
        if (u == v) throw GraphError("self-loop on node " + std::to_string(u));
        if (u >= n_ || v >= n_) {
            throw GraphError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") has an endpoint outside [0, " + std::to_string(n_) + ")");
        }
        if (u > v) std::swap(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end()) {
        throw GraphError("duplicate edge (" + std::to_string(dup->first) + ", " +
                         std::to_string(dup->second) + ")");
    }
}

std::vector<std::vector<NodeId>> Graph::adjacency() const {
    std::vector<std::vector<NodeId>> adj(n_);
    for (const auto &[u, v] : edges_) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (const auto &[u, v] : edges_) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

double Graph::density() const {
    if (n_ < 2) return 0.0;
    return static_cast<double>(edges_.size()) / (0.5 * static_cast<double>(n_ * (n_ - 1)));
}

Graph Graph::cycle(std::size_t n) {
    if (n < 3) throw GraphError("cycle needs at least 3 nodes");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, std::move(e));
}

Graph Graph::complete(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph(n, std::move(e));
}

SpinAssignment::SpinAssignment(std::vector<Spin> spins) : spins_(std::move(spins)) {
    for (Spin s : spins_) {
        if (s != 1 && s != -1) throw std::invalid_argument("spin values must be +1 or -1");
    }
}

SpinAssignment SpinAssignment::flipped() const {
    std::vector<Spin> out(spins_.size());
    std::transform(spins_.begin(), spins_.end(), out.begin(), [](Spin s) { return static_cast<Spin>(-s); });
    return SpinAssignment(std::move(out));
}

Graph gen_random(std::size_t n, double eta, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_random: need n >= 2");
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("gen_random: eta must lie in [0, 1]");

    const std::size_t pairs = n * (n - 1) / 2;
    const auto m = static_cast<std::size_t>(std::llround(eta * static_cast<double>(pairs)));

    std::vector<Edge> all;
    all.reserve(pairs);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) all.emplace_back(u, v);

    // Partial Fisher-Yates: the first m slots end up a uniform m-subset.
    Rng rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + uniform_index(rng, pairs - i);
        std::swap(all[i], all[j]);
    }
    all.resize(m);
    return Graph(n, std::move(all));
}

namespace {

void require_match(const Graph &g, const SpinAssignment &a) {
    if (a.size() != g.node_count()) {
        throw std::invalid_argument("spin assignment has " + std::to_string(a.size()) +
                                    " entries, graph has " + std::to_string(g.node_count()) + " nodes");
    }
}

}  // namespace

std::size_t cut_value(const Graph &g, const SpinAssignment &a) {
    require_match(g, a);
    return static_cast<std::size_t>(std::count_if(g.edges().begin(), g.edges().end(),
                                                   [&](const Edge &e) { return a[e.first] != a[e.second]; }));
}

std::int64_t ising_energy(const Graph &g, const SpinAssignment &a) {
    require_match(g, a);
    std::int64_t h = 0;
    for (const auto &[u, v] : g.edges()) h += a[u] * a[v];
    return h;
}

CutResult evaluate_cut(const Graph &g, const SpinAssignment &a) {
    return CutResult{a, cut_value(g, a), ising_energy(g, a), 0.0};
}

CutResult brute_force_maxcut(const Graph &g) {
    const std::size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("brute_force_maxcut: empty graph");
    if (n > kMaxBruteForceNodes) {
        throw std::invalid_argument("brute_force_maxcut: n = " + std::to_string(n) + " exceeds limit of " +
                                    std::to_string(kMaxBruteForceNodes));
    }

    // Bit i of `side` set <=> spin i = -1. Node 0 is pinned to +1.
    std::vector<std::uint32_t> adj(n, 0);
    for (const auto &[u, v] : g.edges()) {
        adj[u] |= 1u << v;
        adj[v] |= 1u << u;
    }

    // Lex key: spin 1 is the most significant digit, +1 -> bit set. Smaller key wins ties.
    auto key_bit = [n](std::size_t i) -> std::uint32_t { return 1u << (n - 1 - i); };

    std::uint32_t side = 0;
    std::uint32_t key = 0;
    for (std::size_t i = 1; i < n; ++i) key |= key_bit(i);
    std::int64_t cut = 0;

    std::uint32_t best_side = 0;
    std::uint32_t best_key = key;
    std::int64_t best_cut = 0;

    const std::uint64_t count = std::uint64_t{1} << (n - 1);
    for (std::uint64_t step = 1; step < count; ++step) {
        // Gray code over nodes 1..n-1.
        const std::size_t node = 1 + static_cast<std::size_t>(std::countr_zero(step));
        const std::uint32_t bit = 1u << node;
        const std::uint32_t same_mask = (side & bit) ? side : ~side;
        const int same = std::popcount(adj[node] & same_mask);
        const int diff = std::popcount(adj[node]) - same;
        cut += same - diff;
        side ^= bit;
        key ^= key_bit(node);
        if (cut > best_cut || (cut == best_cut && key < best_key)) {
            best_cut = cut;
            best_key = key;
            best_side = side;
        }
    }

    std::vector<Spin> spins(n);
    for (std::size_t i = 0; i < n; ++i) spins[i] = (best_side >> i) & 1u ? Spin{-1} : Spin{1};
    return evaluate_cut(g, SpinAssignment(std::move(spins)));
}

Graph parse_graph(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t n = 0, m = 0;
    std::vector<Edge> edges;
    std::set<Edge> seen;

    auto fail = [&](const std::string &what) {
        throw GraphFormatError("line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        long long a = 0, b = 0;
        std::string extra;
        if (!(fields >> a)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) fail("expected two integers");
            continue;
        }
        if (!(fields >> b) || (fields >> extra)) fail("expected exactly two integers");
        if (a < 0 || b < 0) fail("negative value");
        if (!have_header) {
            n = static_cast<std::size_t>(a);
            m = static_cast<std::size_t>(b);
            if (n == 0) fail("malformed header: node count must be positive");
            if (m > n * (n - 1) / 2) fail("malformed header: too many edges for a simple graph");
            have_header = true;
            continue;
        }
        auto u = static_cast<std::size_t>(a), v = static_cast<std::size_t>(b);
        if (u >= n || v >= n) fail("endpoint out of range in edge \"" + std::to_string(a) + " " + std::to_string(b) + "\"");
        if (u == v) fail("self-loop on node " + std::to_string(u));
        Edge e = u < v ? Edge{u, v} : Edge{v, u};
        if (!seen.insert(e).second) fail("duplicate edge \"" + std::to_string(e.first) + " " + std::to_string(e.second) + "\"");
        edges.push_back(e);
    }
    if (!have_header) throw GraphFormatError("malformed header: no \"n m\" line found");
    if (edges.size() != m) {
        throw GraphFormatError("header declares " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
    }
    return Graph(n, std::move(edges));
}

std::string format_graph(const Graph &g) {
    std::ostringstream out;
    out << g.node_count() << ' ' << g.edge_count() << '\n';
    for (const auto &[u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

Graph load_graph(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open graph file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

void save_graph(const Graph &g, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw GraphError("cannot write graph file " + path.string());
    out << format_graph(g);
}

}  // namespace osc_ising

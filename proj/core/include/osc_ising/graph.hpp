#ifndef OSC_ISING_GRAPH_HPP
#define OSC_ISING_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace osc_ising {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by load_graph / parse_graph with the offending line number in the message.
class GraphFormatError : public GraphError {
public:
    using GraphError::GraphError;
};

/// Undirected, unweighted simple graph. Edges are stored canonicalized (u < v) and sorted.
class Graph {
public:
    Graph() = default;

    /// Throws GraphError on self-loops, duplicate edges or out-of-range endpoints.
    Graph(std::size_t n, std::vector<Edge> edges);

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge> &edges() const noexcept { return edges_; }

    std::vector<std::vector<NodeId>> adjacency() const;
    std::vector<std::size_t> degrees() const;

    /// Edge density: |E| / (n(n-1)/2).
    double density() const;

    bool operator==(const Graph &other) const = default;

    static Graph cycle(std::size_t n);
    static Graph complete(std::size_t n);

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

using Spin = std::int8_t;

/// Ising spins in {+1, -1}; node i belongs to S1 when spins[i] == +1.
class SpinAssignment {
public:
    SpinAssignment() = default;
    explicit SpinAssignment(std::vector<Spin> spins);

    static SpinAssignment all_up(std::size_t n) { return SpinAssignment(std::vector<Spin>(n, 1)); }

    std::size_t size() const noexcept { return spins_.size(); }
    Spin operator[](std::size_t i) const { return spins_[i]; }
    const std::vector<Spin> &values() const noexcept { return spins_; }

    SpinAssignment flipped() const;

    bool operator==(const SpinAssignment &other) const = default;

private:
    std::vector<Spin> spins_;
};

struct CutResult {
    SpinAssignment spins;
    std::size_t cut = 0;
    std::int64_t ising_energy = 0;
    double residual_deg = 0.0;
};

/// Uniform sample of exactly round(eta * n(n-1)/2) distinct edges.
Graph gen_random(std::size_t n, double eta, std::uint64_t seed);

std::size_t cut_value(const Graph &g, const SpinAssignment &a);

/// H = sum over edges of s_u * s_v (couplings J_ij = -1 on every edge).
std::int64_t ising_energy(const Graph &g, const SpinAssignment &a);

CutResult evaluate_cut(const Graph &g, const SpinAssignment &a);

inline constexpr std::size_t kMaxBruteForceNodes = 24;

/// Exhaustive MaxCut over the 2^(n-1) assignments with spins[0] = +1.
/// Ties resolve to the lexicographically smallest spin vector (with -1 < +1).
CutResult brute_force_maxcut(const Graph &g);

Graph parse_graph(const std::string &text);
std::string format_graph(const Graph &g);
Graph load_graph(const std::filesystem::path &path);
void save_graph(const Graph &g, const std::filesystem::path &path);

}  // namespace osc_ising

#endif  // OSC_ISING_GRAPH_HPP

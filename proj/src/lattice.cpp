#include "bhpc/lattice.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bhpc {

std::string region_name(Region r) {
    switch (r) {
        case Region::LeftRing: return "left_ring";
        case Region::RightRing: return "right_ring";
        case Region::Chain: return "chain";
        case Region::Whole: return "whole";
    }
    throw std::logic_error("region_name: unknown region");
}

Region region_from_name(const std::string& name) {
    if (name == "left_ring") return Region::LeftRing;
    if (name == "right_ring") return Region::RightRing;
    if (name == "chain") return Region::Chain;
    if (name == "whole") return Region::Whole;
    throw std::invalid_argument("unknown region name: " + name);
}

std::vector<int> SiteGraph::region_sites(Region r) const {
    auto it = regions.find(r);
    if (it != regions.end()) return it->second;
    if (r == Region::Whole) {
        std::vector<int> all(static_cast<size_t>(n_sites));
        for (int i = 0; i < n_sites; ++i) all[static_cast<size_t>(i)] = i;
        return all;
    }
    throw std::invalid_argument("layout has no region " + region_name(r));
}

LayoutSpec LayoutSpec::ring(int m, double j_hop, double g) {
    LayoutSpec s;
    s.kind = Kind::Ring;
    s.m = m;
    s.j_hop = j_hop;
    s.g = g;
    return s;
}

LayoutSpec LayoutSpec::two_rings_point(int m, double epsilon, double j_hop, double g) {
    LayoutSpec s;
    s.kind = Kind::TwoRingsPoint;
    s.m = m;
    s.epsilon = epsilon;
    s.j_hop = j_hop;
    s.g = g;
    return s;
}

LayoutSpec LayoutSpec::two_rings_chain(int m, int chain_len, double epsilon, double j_hop,
                                       double g, double g_chain) {
    LayoutSpec s;
    s.kind = Kind::TwoRingsChain;
    s.m = m;
    s.chain_len = chain_len;
    s.epsilon = epsilon;
    s.j_hop = j_hop;
    s.g = g;
    s.g_chain = g_chain;
    return s;
}

namespace {

void add_ring_bonds(SiteGraph& graph, int first, int m, double j_hop) {
    for (int s = 0; s < m; ++s)
        graph.bonds.push_back({first + s, first + (s + 1) % m, j_hop});
}

}  // namespace

SiteGraph build_layout(const LayoutSpec& spec) {
    if (spec.m < 3) throw std::invalid_argument("build_layout: ring size must be >= 3");
    if (spec.kind != LayoutSpec::Kind::Ring) {
        if (!(spec.epsilon > 0.0) || spec.epsilon > spec.j_hop)
            throw std::invalid_argument("build_layout: junction hop must satisfy 0 < epsilon <= J");
    }
    if (spec.kind == LayoutSpec::Kind::TwoRingsChain && spec.chain_len < 0)
        throw std::invalid_argument("build_layout: chain length must be >= 0");

    SiteGraph graph;
    graph.j_hop = spec.j_hop;
    const int m = spec.m;

    switch (spec.kind) {
        case LayoutSpec::Kind::Ring: {
            graph.n_sites = m;
            add_ring_bonds(graph, 0, m, spec.j_hop);
            graph.g_site = Eigen::VectorXd::Constant(m, spec.g);
            std::vector<int> all(static_cast<size_t>(m));
            for (int i = 0; i < m; ++i) all[static_cast<size_t>(i)] = i;
            graph.regions[Region::Whole] = all;
            break;
        }
        case LayoutSpec::Kind::TwoRingsPoint:
        case LayoutSpec::Kind::TwoRingsChain: {
            // Chain of length 0 degenerates to the point contact.
            const int chain =
                spec.kind == LayoutSpec::Kind::TwoRingsChain ? spec.chain_len : 0;
            graph.n_sites = 2 * m + chain;
            graph.epsilon = spec.epsilon;
            const int chain_first = m;
            const int right_first = m + chain;

            add_ring_bonds(graph, 0, m, spec.j_hop);
            add_ring_bonds(graph, right_first, m, spec.j_hop);
            for (int s = 0; s + 1 < chain; ++s)
                graph.bonds.push_back({chain_first + s, chain_first + s + 1, spec.j_hop});
            if (chain > 0) {
                graph.junction_bonds.push_back(static_cast<int>(graph.bonds.size()));
                graph.bonds.push_back({0, chain_first, spec.epsilon});
                graph.junction_bonds.push_back(static_cast<int>(graph.bonds.size()));
                graph.bonds.push_back({chain_first + chain - 1, right_first, spec.epsilon});
            } else {
                graph.junction_bonds.push_back(static_cast<int>(graph.bonds.size()));
                graph.bonds.push_back({0, right_first, spec.epsilon});
            }

            graph.g_site = Eigen::VectorXd::Constant(graph.n_sites, spec.g);
            graph.g_site.segment(chain_first, chain).setConstant(spec.g_chain);

            std::vector<int> left, mid, right;
            for (int i = 0; i < m; ++i) left.push_back(i);
            for (int i = 0; i < chain; ++i) mid.push_back(chain_first + i);
            for (int i = 0; i < m; ++i) right.push_back(right_first + i);
            graph.regions[Region::LeftRing] = left;
            graph.regions[Region::RightRing] = right;
            if (spec.kind == LayoutSpec::Kind::TwoRingsChain)
                graph.regions[Region::Chain] = mid;
            break;
        }
    }
    validate_graph(graph);
    return graph;
}

void validate_graph(const SiteGraph& graph) {
    if (graph.n_sites <= 0) throw std::invalid_argument("graph: no sites");
    if (graph.g_site.size() != graph.n_sites)
        throw std::invalid_argument("graph: g_site length mismatch");
    std::set<std::pair<int, int>> seen;
    for (const auto& b : graph.bonds) {
        if (b.i < 0 || b.i >= graph.n_sites || b.j < 0 || b.j >= graph.n_sites)
            throw std::invalid_argument("graph: bond endpoint out of range");
        if (b.i == b.j) throw std::invalid_argument("graph: self-loop bond");
        auto key = std::minmax(b.i, b.j);
        if (!seen.insert(key).second) throw std::invalid_argument("graph: duplicate bond");
    }
    std::vector<int> cover(static_cast<size_t>(graph.n_sites), 0);
    for (const auto& [r, sites] : graph.regions)
        for (int s : sites) {
            if (s < 0 || s >= graph.n_sites)
                throw std::invalid_argument("graph: region site out of range");
            ++cover[static_cast<size_t>(s)];
        }
    for (int c : cover)
        if (c != 1) throw std::invalid_argument("graph: regions must partition the sites");
}

Eigen::MatrixXd hopping_matrix(const SiteGraph& graph) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(graph.n_sites, graph.n_sites);
    for (const auto& b : graph.bonds) {
        h(b.i, b.j) -= 0.5 * b.hop;
        h(b.j, b.i) -= 0.5 * b.hop;
    }
    return h;
}

EnergyBreakdown classical_energy(const SiteGraph& graph, const FieldState& state) {
    if (state.size() != graph.n_sites)
        throw std::invalid_argument("classical_energy: state length mismatch");
    EnergyBreakdown e;
    for (const auto& b : graph.bonds)
        e.kinetic -= b.hop * (std::conj(state[b.i]) * state[b.j]).real();
    for (int l = 0; l < graph.n_sites; ++l)
        e.potential += 0.5 * graph.g_site[l] * std::norm(state[l]) * std::norm(state[l]);
    e.total = e.kinetic + e.potential;
    return e;
}

}  // namespace bhpc

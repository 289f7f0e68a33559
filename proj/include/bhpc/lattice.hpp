#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace bhpc {

/// One classical trajectory: complex amplitude per site, scaled so that mean
/// density n=1 corresponds to |a|^2 of order 1.
using FieldState = Eigen::VectorXcd;

enum class Region { LeftRing, RightRing, Chain, Whole };

std::string region_name(Region r);
Region region_from_name(const std::string& name);

struct Bond {
    int i = 0;
    int j = 0;
    double hop = 0.0;  ///< hopping energy; enters the Hamiltonian as -hop/2
};

/// Lattice topology plus couplings. Immutable after construction; the single
/// source of truth for the Hamiltonian.
struct SiteGraph {
    int n_sites = 0;
    std::vector<Bond> bonds;
    Eigen::VectorXd g_site;  ///< per-site interaction constant g = U*n
    std::map<Region, std::vector<int>> regions;
    std::vector<int> junction_bonds;  ///< indices into bonds of the reduced-hop contacts
    double j_hop = 1.0;               ///< regular bond hopping J
    double epsilon = 0.0;             ///< junction hopping (0 when no junctions)

    /// Sites of a region. Region::Whole always resolves (to all sites).
    std::vector<int> region_sites(Region r) const;
    bool has_region(Region r) const { return regions.count(r) > 0; }
};

struct LayoutSpec {
    enum class Kind { Ring, TwoRingsPoint, TwoRingsChain };
    Kind kind = Kind::Ring;
    int m = 0;              ///< ring size
    int chain_len = 0;      ///< chain sites between the rings (TwoRingsChain)
    double j_hop = 1.0;
    double epsilon = 1.0;   ///< junction hop, 0 < epsilon <= J
    double g = 0.0;         ///< interaction on ring sites
    double g_chain = 0.0;   ///< interaction on chain sites

    static LayoutSpec ring(int m, double j_hop = 1.0, double g = 0.0);
    static LayoutSpec two_rings_point(int m, double epsilon, double j_hop = 1.0, double g = 0.0);
    static LayoutSpec two_rings_chain(int m, int chain_len, double epsilon, double j_hop = 1.0,
                                      double g = 0.0, double g_chain = 0.0);
};

/// Builds one of the supported layouts. Site order is left ring, chain, right
/// ring; site 0 of each ring is its contact site (rings are translation
/// invariant, so the choice is gauge).
SiteGraph build_layout(const LayoutSpec& spec);

/// Checks the structural invariants (valid indices, no duplicate bonds or
/// self-loops, disjoint regions covering all sites). Throws on violation.
void validate_graph(const SiteGraph& graph);

/// h[l,l'] = -hop/2 for every bond, zero elsewhere; real symmetric.
Eigen::MatrixXd hopping_matrix(const SiteGraph& graph);

struct EnergyBreakdown {
    double total = 0.0;
    double kinetic = 0.0;    ///< sum over bonds of -(hop/2)(a_i* a_j + c.c.)
    double potential = 0.0;  ///< sum over sites of (g/2)|a|^4
};

EnergyBreakdown classical_energy(const SiteGraph& graph, const FieldState& state);

}  // namespace bhpc

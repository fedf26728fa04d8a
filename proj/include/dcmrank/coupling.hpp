#pragma once

#include "dcmrank/graph.hpp"
#include "dcmrank/rng.hpp"
#include "dcmrank/sequence.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dcmrank {

/**
 * Thorny branching tree stored in breadth-first order.
 *
 * Node 0 is the root. Children of a node are contiguous and appear in the
 * order of their parent's inbound stubs. For non-root nodes `out_degree`
 * counts the unpaired thorns, i.e. the owner's out-degree minus the stub
 * used to reach the parent.
 */
struct ThornyTree {
    std::vector<std::int64_t> parent;       // -1 for the root
    std::vector<std::int64_t> child_rank;   // 1-based position among siblings, 0 for the root
    std::vector<std::int32_t> generation;
    std::vector<std::size_t> first_child;   // valid when generation < depth
    std::vector<std::int64_t> in_degree;    // offspring count N^
    std::vector<std::int64_t> out_degree;   // thorns D^
    std::vector<double> weight;             // C^
    std::vector<double> personalization;    // Q^
    std::vector<double> path_weight;        // Pi^
    std::vector<std::size_t> generation_start;  // size depth + 2; last entry = node count
    int depth = 0;

    [[nodiscard]] std::size_t size() const noexcept { return parent.size(); }
    [[nodiscard]] std::size_t generation_size(int r) const {
        return generation_start[static_cast<std::size_t>(r) + 1] -
               generation_start[static_cast<std::size_t>(r)];
    }
    //! Dot-separated child ranks from the root; empty for the root.
    [[nodiscard]] std::string node_path(std::size_t node) const;

    //! Appends a node (generation bookkeeping is done by finalize_generations()).
    std::size_t add_node(std::int64_t parent_index, std::int64_t rank, std::int32_t gen,
                         std::int64_t n, std::int64_t d, double c, double q, double pi);
    //! Rebuilds first_child and generation_start from the parent links.
    void finalize(int depth);
};

struct GenerationSizes {
    std::vector<std::int64_t> inbound;   // Z^_r
    std::vector<std::int64_t> outbound;  // V^_r
};

//! Per-generation inbound and outbound stub totals for r = 0..depth.
GenerationSizes tree_generation_sizes(const ThornyTree& tree);

//! Coupling time: generations completed before the first label-2/3 draw.
struct CouplingTime {
    int generation = 0;   // tau; equals depth + 1 when not broken
    bool broken = false;  // false: no label-2/3 draw through generation `depth`
};

struct CouplingResult {
    DirectedMultigraph graph;
    ThornyTree tree;
    NodeId first_node = 0;
    CouplingTime tau;
};

struct CouplingOptions {
    //! Pair every inbound stub of the graph; when false the graph holds only the
    //! edges paired while exploring generations 0..depth from the first node.
    bool complete_graph = true;
    std::size_t max_tree_nodes = 100'000'000;
};

/**
 * Breadth-first construction of the configuration graph from a uniformly
 * chosen first node together with the coupled thorny branching tree to depth
 * `max_generations`.
 *
 * Every inbound stub of a tree node triggers one uniform draw among all L_n
 * outbound stubs, and the tree child copies the owner's attributes. While the
 * tree node is also a graph node, the same draw pairs the graph stub; a draw
 * that hits an already paired stub is replaced in the graph by a uniform draw
 * over the unpaired stubs. The graph law is therefore the uniform pairing.
 */
CouplingResult build_coupled(const ExtendedBiDegreeSequence& seq, int max_generations,
                             RandomStream& rng, const CouplingOptions& options = {});

//! Canonical form of the depth-r in-neighbourhood of `root`; revisited nodes are marked.
std::string graph_ball_signature(const DirectedMultigraph& graph, NodeId root, int radius);
//! Canonical form of generations 0..radius, reporting full out-degrees (thorns + parent link).
std::string tree_ball_signature(const ThornyTree& tree, int radius);

} // namespace dcmrank

#pragma once

#include "dcmrank/rng.hpp"
#include "dcmrank/sequence.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dcmrank {

//! Compressed in-neighbour lists; neighbours of v are sources[offsets[v] .. offsets[v+1]).
struct InAdjacency {
    std::vector<std::size_t> offsets;
    std::vector<NodeId> sources;

    [[nodiscard]] std::span<const NodeId> of(NodeId v) const {
        return {sources.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
};

/**
 * Directed multigraph on nodes 0..n-1 stored as a flat edge list.
 *
 * Self-loops and parallel edges are kept. Node attributes (N, D, C, Q) are the
 * sequence the graph was wired from, so realized degrees equal N and D.
 */
struct DirectedMultigraph {
    ExtendedBiDegreeSequence attributes;
    std::vector<NodeId> source;
    std::vector<NodeId> target;

    [[nodiscard]] std::size_t node_count() const noexcept { return attributes.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return source.size(); }

    //! Built on demand, in edge-index order within each list.
    [[nodiscard]] InAdjacency in_adjacency() const;

    [[nodiscard]] std::vector<std::int64_t> realized_in_degrees() const;
    [[nodiscard]] std::vector<std::int64_t> realized_out_degrees() const;
};

//! Uniform stub pairing via a Fisher-Yates shuffle of the outbound stubs.
DirectedMultigraph build_graph(const ExtendedBiDegreeSequence& seq, RandomStream& rng);

//! Graph with the given edges; degrees in `attributes` must match the edge list.
DirectedMultigraph graph_from_edges(ExtendedBiDegreeSequence attributes,
                                    std::vector<NodeId> source, std::vector<NodeId> target);

} // namespace dcmrank

#include "dcmrank/graph.hpp"

#include "dcmrank/errors.hpp"

#include <limits>
#include <utility>

namespace dcmrank {

InAdjacency DirectedMultigraph::in_adjacency() const {
    const std::size_t n = node_count();
    InAdjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (NodeId t : target) ++adj.offsets[t + 1];
    for (std::size_t v = 0; v < n; ++v) adj.offsets[v + 1] += adj.offsets[v];
    adj.sources.resize(edge_count());
    std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
    for (std::size_t e = 0; e < edge_count(); ++e) adj.sources[cursor[target[e]]++] = source[e];
    return adj;
}

std::vector<std::int64_t> DirectedMultigraph::realized_in_degrees() const {
    std::vector<std::int64_t> deg(node_count(), 0);
    for (NodeId t : target) ++deg[t];
    return deg;
}

std::vector<std::int64_t> DirectedMultigraph::realized_out_degrees() const {
    std::vector<std::int64_t> deg(node_count(), 0);
    for (NodeId s : source) ++deg[s];
    return deg;
}

DirectedMultigraph build_graph(const ExtendedBiDegreeSequence& seq, RandomStream& rng) {
    seq.validate();
    if (seq.size() > std::numeric_limits<NodeId>::max())
        throw InvalidSequence("too many nodes for 32-bit node ids");
    const auto stubs = static_cast<std::size_t>(seq.total_stubs());

    DirectedMultigraph g;
    g.attributes = seq;
    g.source.reserve(stubs);
    for (std::size_t v = 0; v < seq.size(); ++v)
        g.source.insert(g.source.end(), static_cast<std::size_t>(seq.out_degree[v]),
                        static_cast<NodeId>(v));
    for (std::size_t i = stubs; i > 1; --i) std::swap(g.source[i - 1], g.source[rng.below(i)]);

    g.target.reserve(stubs);
    for (std::size_t v = 0; v < seq.size(); ++v)
        g.target.insert(g.target.end(), static_cast<std::size_t>(seq.in_degree[v]),
                        static_cast<NodeId>(v));
    return g;
}

DirectedMultigraph graph_from_edges(ExtendedBiDegreeSequence attributes,
                                    std::vector<NodeId> source, std::vector<NodeId> target) {
    if (source.size() != target.size())
        throw InvalidSequence("edge list columns have different lengths");
    DirectedMultigraph g;
    g.attributes = std::move(attributes);
    g.source = std::move(source);
    g.target = std::move(target);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (g.source[e] >= g.node_count() || g.target[e] >= g.node_count())
            throw InvalidSequence("edge endpoint out of range");
    g.attributes.validate();
    if (g.realized_in_degrees() != g.attributes.in_degree ||
        g.realized_out_degrees() != g.attributes.out_degree)
        throw InvalidSequence("edge list does not realize the attribute degrees");
    return g;
}

} // namespace dcmrank

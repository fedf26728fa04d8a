#include "dcmrank/coupling.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <unordered_set>

namespace dcmrank {

std::string ThornyTree::node_path(std::size_t node) const {
    std::vector<std::int64_t> ranks;
    for (auto v = static_cast<std::int64_t>(node); parent[static_cast<std::size_t>(v)] >= 0;
         v = parent[static_cast<std::size_t>(v)])
        ranks.push_back(child_rank[static_cast<std::size_t>(v)]);
    std::string path;
    for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
        if (!path.empty()) path += '.';
        path += std::to_string(*it);
    }
    return path;
}

std::size_t ThornyTree::add_node(std::int64_t parent_index, std::int64_t rank, std::int32_t gen,
                                 std::int64_t n, std::int64_t d, double c, double q, double pi) {
    parent.push_back(parent_index);
    child_rank.push_back(rank);
    generation.push_back(gen);
    in_degree.push_back(n);
    out_degree.push_back(d);
    weight.push_back(c);
    personalization.push_back(q);
    path_weight.push_back(pi);
    return parent.size() - 1;
}

void ThornyTree::finalize(int tree_depth) {
    depth = tree_depth;
    const std::size_t count = size();
    first_child.assign(count, count);
    for (std::size_t v = count; v-- > 1;)
        first_child[static_cast<std::size_t>(parent[v])] = v;
    generation_start.assign(static_cast<std::size_t>(depth) + 2, count);
    for (std::size_t v = count; v-- > 0;)
        generation_start[static_cast<std::size_t>(generation[v])] = v;
    for (std::size_t r = generation_start.size() - 1; r-- > 0;)
        generation_start[r] = std::min(generation_start[r], generation_start[r + 1]);
}

GenerationSizes tree_generation_sizes(const ThornyTree& tree) {
    GenerationSizes sizes;
    sizes.inbound.assign(static_cast<std::size_t>(tree.depth) + 1, 0);
    sizes.outbound.assign(static_cast<std::size_t>(tree.depth) + 1, 0);
    for (std::size_t v = 0; v < tree.size(); ++v) {
        const auto r = static_cast<std::size_t>(tree.generation[v]);
        sizes.inbound[r] += tree.in_degree[v];
        sizes.outbound[r] += tree.out_degree[v];
    }
    return sizes;
}

namespace {

constexpr std::uint32_t kUnsynced = std::numeric_limits<std::uint32_t>::max();

class CouplingBuilder {
public:
    CouplingBuilder(const ExtendedBiDegreeSequence& seq, RandomStream& rng,
                    const CouplingOptions& options)
        : seq_(seq), rng_(rng), options_(options), n_(seq.size()),
          stubs_(static_cast<std::size_t>(seq.total_stubs())) {
        stub_owner_.reserve(stubs_);
        for (std::size_t v = 0; v < n_; ++v)
            stub_owner_.insert(stub_owner_.end(), static_cast<std::size_t>(seq.out_degree[v]),
                               static_cast<NodeId>(v));
        attached_.assign(n_, 0);
        processed_.assign(n_, 0);
        paired_.assign(stubs_, 0);
    }

    CouplingResult run(int max_generations) {
        CouplingResult result;
        result.first_node = static_cast<NodeId>(rng_.below(n_));
        attach(result.first_node);

        ThornyTree& tree = result.tree;
        const NodeId first = result.first_node;
        tree.add_node(-1, 0, 0, seq_.in_degree[first], seq_.out_degree[first], seq_.weight[first],
                      seq_.personalization[first], 1.0);
        std::vector<std::uint32_t> sync{first};

        result.tau = {max_generations + 1, false};
        for (std::size_t t = 0; t < tree.size(); ++t) {
            const std::int32_t gen = tree.generation[t];
            const NodeId g = sync[t];
            const bool grow = gen < max_generations;
            for (std::int64_t j = 1; j <= tree.in_degree[t]; ++j) {
                const std::size_t s = rng_.below(stubs_);
                const NodeId owner = stub_owner_[s];
                const int label = paired_[s] ? 3 : (attached_[owner] ? 2 : 1);

                std::uint32_t child_sync = kUnsynced;
                if (g != kUnsynced) {
                    if (label != 1 && !result.tau.broken) result.tau = {gen, true};
                    std::size_t chosen = s;
                    while (paired_[chosen]) chosen = rng_.below(stubs_);
                    const NodeId source = stub_owner_[chosen];
                    pair(chosen, g);
                    if (label == 1) child_sync = source;
                }
                if (grow) {
                    if (tree.size() >= options_.max_tree_nodes)
                        throw PopulationCapExceeded("thorny tree exceeded its node budget");
                    tree.add_node(static_cast<std::int64_t>(t), j, gen + 1, seq_.in_degree[owner],
                                  seq_.out_degree[owner] - 1, seq_.weight[owner],
                                  seq_.personalization[owner],
                                  tree.path_weight[t] * seq_.weight[owner]);
                    sync.push_back(child_sync);
                }
            }
            if (g != kUnsynced) processed_[g] = 1;
        }
        tree.finalize(max_generations);

        if (options_.complete_graph) complete();
        result.graph.attributes = seq_;
        result.graph.source = std::move(source_);
        result.graph.target = std::move(target_);
        return result;
    }

private:
    void attach(NodeId v) {
        attached_[v] = 1;
        order_.push_back(v);
    }

    void pair(std::size_t stub, NodeId target) {
        paired_[stub] = 1;
        const NodeId source = stub_owner_[stub];
        source_.push_back(source);
        target_.push_back(target);
        if (!attached_[source]) attach(source);
    }

    //! Pairs every remaining inbound stub with a uniformly chosen unpaired outbound stub.
    void complete() {
        std::vector<std::size_t> pool;
        pool.reserve(stubs_ - source_.size());
        for (std::size_t s = 0; s < stubs_; ++s)
            if (!paired_[s]) pool.push_back(s);

        auto drain = [&](NodeId v) {
            processed_[v] = 1;
            for (std::int64_t j = 0; j < seq_.in_degree[v]; ++j) {
                const std::size_t pick = rng_.below(pool.size());
                const std::size_t stub = pool[pick];
                pool[pick] = pool.back();
                pool.pop_back();
                pair(stub, v);
            }
        };
        // nodes already reached (breadth-first in attachment order), then the rest
        std::size_t cursor = 0;
        auto drain_queue = [&] {
            for (; cursor < order_.size(); ++cursor)
                if (!processed_[order_[cursor]]) drain(order_[cursor]);
        };
        drain_queue();
        for (NodeId v = 0; v < n_; ++v) {
            if (!attached_[v]) attach(v);
            drain_queue();
        }
    }

    const ExtendedBiDegreeSequence& seq_;
    RandomStream& rng_;
    const CouplingOptions& options_;
    std::size_t n_;
    std::size_t stubs_;
    std::vector<NodeId> stub_owner_;
    std::vector<std::uint8_t> attached_;
    std::vector<std::uint8_t> processed_;
    std::vector<std::uint8_t> paired_;
    std::vector<NodeId> order_;
    std::vector<NodeId> source_;
    std::vector<NodeId> target_;
};

void append_attributes(std::string& out, std::int64_t n, std::int64_t d, double c, double q) {
    char buf[64];
    out += std::to_string(n);
    out += ',';
    out += std::to_string(d);
    out += ',';
    auto r = std::to_chars(buf, buf + sizeof buf, c, std::chars_format::hex);
    out.append(buf, r.ptr);
    out += ',';
    r = std::to_chars(buf, buf + sizeof buf, q, std::chars_format::hex);
    out.append(buf, r.ptr);
}

} // namespace

CouplingResult build_coupled(const ExtendedBiDegreeSequence& seq, int max_generations,
                             RandomStream& rng, const CouplingOptions& options) {
    seq.validate();
    if (seq.size() == 0) throw InvalidSequence("cannot explore an empty graph");
    if (seq.size() >= kUnsynced) throw InvalidSequence("too many nodes for 32-bit node ids");
    if (max_generations < 0) throw InvalidParameter("max_generations must be >= 0");
    CouplingBuilder builder(seq, rng, options);
    return builder.run(max_generations);
}

std::string graph_ball_signature(const DirectedMultigraph& graph, NodeId root, int radius) {
    const InAdjacency adj = graph.in_adjacency();
    const auto& a = graph.attributes;
    std::unordered_set<NodeId> seen;
    std::function<std::string(NodeId, int)> encode = [&](NodeId v, int depth) {
        std::string out = "(";
        if (!seen.insert(v).second) out += "#revisit:";
        append_attributes(out, a.in_degree[v], a.out_degree[v], a.weight[v], a.personalization[v]);
        if (depth < radius) {
            std::vector<std::string> children;
            for (NodeId u : adj.of(v)) children.push_back(encode(u, depth + 1));
            std::sort(children.begin(), children.end());
            out += '[';
            for (const auto& child : children) out += child;
            out += ']';
        }
        out += ')';
        return out;
    };
    return encode(root, 0);
}

std::string tree_ball_signature(const ThornyTree& tree, int radius) {
    if (radius > tree.depth) throw InvalidParameter("radius exceeds the tree depth");
    std::function<std::string(std::size_t, int)> encode = [&](std::size_t v, int depth) {
        std::string out = "(";
        append_attributes(out, tree.in_degree[v], tree.out_degree[v] + (v == 0 ? 0 : 1),
                          tree.weight[v], tree.personalization[v]);
        if (depth < radius) {
            std::vector<std::string> children;
            for (std::int64_t j = 0; j < tree.in_degree[v]; ++j)
                children.push_back(encode(tree.first_child[v] + static_cast<std::size_t>(j), depth + 1));
            std::sort(children.begin(), children.end());
            out += '[';
            for (const auto& child : children) out += child;
            out += ']';
        }
        out += ')';
        return out;
    };
    return encode(0, 0);
}

} // namespace dcmrank

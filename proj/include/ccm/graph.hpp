#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ccm {

using NodeSet = std::set<std::string>;
using Edge = std::pair<std::string, std::string>;

enum class Visibility { Observed, Latent };
enum class Sort { Classical, Quantum };
enum class Direction { Forward, Backward };

struct Node {
    std::string id;
    Visibility visibility = Visibility::Observed;
    Sort sort = Sort::Classical;
};

constexpr std::size_t kMaxGraphNodes = 16;

// Directed graph that may contain cycles. Immutable once built; node order is
// the declaration order and is used for all deterministic iteration.
class CausalGraph {
public:
    CausalGraph() = default;
    CausalGraph(std::vector<Node> nodes, std::vector<Edge> edges);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t size() const { return nodes_.size(); }

    bool has_node(const std::string& id) const;
    int index(const std::string& id) const;  // throws UnknownNode
    const Node& node(const std::string& id) const;
    bool has_edge(const std::string& from, const std::string& to) const;

    NodeSet parents(const std::string& id) const;
    NodeSet children(const std::string& id) const;
    NodeSet all() const;
    NodeSet observed() const;
    NodeSet latent() const;
    bool is_acyclic() const;

    // Bitmask helpers over declaration indices.
    std::uint32_t mask(const NodeSet& s) const;  // throws UnknownNode
    NodeSet set_of(std::uint32_t mask) const;
    std::uint32_t parent_mask(int i) const { return parents_[i]; }
    std::uint32_t child_mask(int i) const { return children_[i]; }
    std::uint32_t reach_mask(std::uint32_t from, Direction dir) const;

    bool operator==(const CausalGraph& o) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> parents_;
    std::vector<std::uint32_t> children_;
};

NodeSet reachable(const CausalGraph& g, const NodeSet& s, Direction direction);
bool d_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z);
CausalGraph mutilate(const CausalGraph& g, const NodeSet& cut_incoming, const NodeSet& cut_outgoing);
NodeSet z_not_ancestors_of_w(const CausalGraph& g, const NodeSet& z, const NodeSet& w);

// Set helpers shared across modules.
NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_minus(const NodeSet& a, const NodeSet& b);
bool disjoint(const NodeSet& a, const NodeSet& b);
bool subset_of(const NodeSet& a, const NodeSet& b);
std::string set_name(const NodeSet& s);  // "AB" style when ids are single chars, else "{A,B}"
void require_disjoint(std::initializer_list<const NodeSet*> sets);

}  // namespace ccm

#include "ccm/graph.hpp"

#include <algorithm>
#include <bit>

#include "ccm/error.hpp"

namespace ccm {

CausalGraph::CausalGraph(std::vector<Node> nodes, std::vector<Edge> edges) : nodes_(std::move(nodes)) {
    if (nodes_.size() > kMaxGraphNodes)
        throw Error(ErrorKind::TooManyNodes,
                    std::to_string(nodes_.size()) + " nodes exceed the limit of " + std::to_string(kMaxGraphNodes));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id.empty()) throw Error(ErrorKind::InvalidGraph, "empty node id");
        for (std::size_t j = 0; j < i; ++j)
            if (nodes_[j].id == nodes_[i].id) throw Error(ErrorKind::InvalidGraph, "duplicate node id " + nodes_[i].id);
        if (nodes_[i].sort == Sort::Quantum && nodes_[i].visibility != Visibility::Latent)
            throw Error(ErrorKind::InvalidGraph, "quantum node " + nodes_[i].id + " must be latent");
    }
    parents_.assign(nodes_.size(), 0);
    children_.assign(nodes_.size(), 0);
    for (auto& e : edges) {
        if (!has_node(e.first)) throw Error(ErrorKind::UnknownNode, e.first);
        if (!has_node(e.second)) throw Error(ErrorKind::UnknownNode, e.second);
        if (e.first == e.second) throw Error(ErrorKind::InvalidGraph, "self-loop on " + e.first);
        int a = index(e.first), b = index(e.second);
        if (children_[a] >> b & 1u) continue;  // duplicate edge
        children_[a] |= 1u << b;
        parents_[b] |= 1u << a;
        edges_.push_back(e);
    }
}

bool CausalGraph::has_node(const std::string& id) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.id == id; });
}

int CausalGraph::index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].id == id) return static_cast<int>(i);
    throw Error(ErrorKind::UnknownNode, id);
}

const Node& CausalGraph::node(const std::string& id) const { return nodes_[index(id)]; }

bool CausalGraph::has_edge(const std::string& from, const std::string& to) const {
    return (children_[index(from)] >> index(to)) & 1u;
}

NodeSet CausalGraph::parents(const std::string& id) const { return set_of(parents_[index(id)]); }
NodeSet CausalGraph::children(const std::string& id) const { return set_of(children_[index(id)]); }

NodeSet CausalGraph::all() const {
    NodeSet s;
    for (auto& n : nodes_) s.insert(n.id);
    return s;
}

NodeSet CausalGraph::observed() const {
    NodeSet s;
    for (auto& n : nodes_)
        if (n.visibility == Visibility::Observed) s.insert(n.id);
    return s;
}

NodeSet CausalGraph::latent() const {
    NodeSet s;
    for (auto& n : nodes_)
        if (n.visibility == Visibility::Latent) s.insert(n.id);
    return s;
}

bool CausalGraph::is_acyclic() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (reach_mask(1u << i, Direction::Forward) >> i & 1u) return false;
    return true;
}

std::uint32_t CausalGraph::mask(const NodeSet& s) const {
    std::uint32_t m = 0;
    for (auto& id : s) m |= 1u << index(id);
    return m;
}

NodeSet CausalGraph::set_of(std::uint32_t m) const {
    NodeSet s;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (m >> i & 1u) s.insert(nodes_[i].id);
    return s;
}

std::uint32_t CausalGraph::reach_mask(std::uint32_t from, Direction dir) const {
    const auto& adj = dir == Direction::Forward ? children_ : parents_;
    std::uint32_t seen = 0, frontier = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (from >> i & 1u) frontier |= adj[i];
    while (frontier & ~seen) {
        std::uint32_t fresh = frontier & ~seen;
        seen |= fresh;
        frontier = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (fresh >> i & 1u) frontier |= adj[i];
    }
    return seen;
}

bool CausalGraph::operator==(const CausalGraph& o) const {
    if (nodes_.size() != o.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].id != o.nodes_[i].id || nodes_[i].visibility != o.nodes_[i].visibility ||
            nodes_[i].sort != o.nodes_[i].sort)
            return false;
    return parents_ == o.parents_;
}

NodeSet reachable(const CausalGraph& g, const NodeSet& s, Direction direction) {
    return g.set_of(g.reach_mask(g.mask(s), direction));
}

namespace {

struct DsepSearch {
    const CausalGraph& g;
    std::uint32_t xs, ys, zs;
    std::vector<std::uint32_t> desc_or_self;  // node plus strict descendants

    // Walk simple paths; `into` tells whether the edge used to reach v points into v.
    bool open_path_from(int v, bool into, bool at_start, std::uint32_t visited) {
        int n = static_cast<int>(g.size());
        for (int w = 0; w < n; ++w) {
            if (visited >> w & 1u) continue;
            for (int orient = 0; orient < 2; ++orient) {
                // orient 0: edge v -> w, orient 1: edge w -> v
                bool exists = orient == 0 ? (g.child_mask(v) >> w & 1u) : (g.parent_mask(v) >> w & 1u);
                if (!exists) continue;
                if (!at_start) {
                    bool collider = into && orient == 1;
                    bool in_z = zs >> v & 1u;
                    if (collider ? (desc_or_self[v] & zs) == 0 : in_z) continue;
                }
                if (ys >> w & 1u) return true;
                if (xs >> w & 1u) continue;  // a path through another source has an open suffix already covered
                if (open_path_from(w, orient == 0, false, visited | 1u << w)) return true;
            }
        }
        return false;
    }
};

}  // namespace

bool d_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    require_disjoint({&x, &y, &z});
    if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidInput, "d-separation needs nonempty X and Y");
    DsepSearch s{g, g.mask(x), g.mask(y), g.mask(z), {}};
    s.desc_or_self.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        s.desc_or_self[i] = (1u << i) | g.reach_mask(1u << i, Direction::Forward);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (s.xs >> i & 1u)
            if (s.open_path_from(static_cast<int>(i), false, true, 1u << i)) return false;
    return true;
}

CausalGraph mutilate(const CausalGraph& g, const NodeSet& cut_incoming, const NodeSet& cut_outgoing) {
    for (auto& id : cut_incoming) g.index(id);
    for (auto& id : cut_outgoing) g.index(id);
    std::vector<Edge> kept;
    for (auto& e : g.edges())
        if (!cut_incoming.count(e.second) && !cut_outgoing.count(e.first)) kept.push_back(e);
    return CausalGraph(g.nodes(), kept);
}

NodeSet z_not_ancestors_of_w(const CausalGraph& g, const NodeSet& z, const NodeSet& w) {
    g.mask(z);
    NodeSet anc = reachable(g, w, Direction::Backward);
    NodeSet out;
    for (auto& id : z)
        if (!anc.count(id)) out.insert(id);
    return out;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet s = a;
    s.insert(b.begin(), b.end());
    return s;
}

NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
    NodeSet s;
    for (auto& id : a)
        if (!b.count(id)) s.insert(id);
    return s;
}

bool disjoint(const NodeSet& a, const NodeSet& b) {
    for (auto& id : a)
        if (b.count(id)) return false;
    return true;
}

bool subset_of(const NodeSet& a, const NodeSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string set_name(const NodeSet& s) {
    if (s.empty()) return "{}";
    bool short_ids = std::all_of(s.begin(), s.end(), [](const std::string& id) { return id.size() == 1; });
    std::string out;
    if (short_ids) {
        for (auto& id : s) out += id;
        return out;
    }
    out = "{";
    bool first = true;
    for (auto& id : s) {
        if (!first) out += ",";
        out += id;
        first = false;
    }
    return out + "}";
}

void require_disjoint(std::initializer_list<const NodeSet*> sets) {
    std::vector<const NodeSet*> v(sets);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (!disjoint(*v[i], *v[j]))
                throw Error(ErrorKind::OverlappingSets, set_name(*v[i]) + " and " + set_name(*v[j]) + " intersect");
}

}  // namespace ccm

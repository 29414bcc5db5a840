#include "ccm/affects.hpp"

#include "ccm/error.hpp"

namespace ccm {

namespace {

Assignment merge(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    out.insert(b.begin(), b.end());
    return out;
}

void require_relation_sets(const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
    require_disjoint({&x, &y, &z, &w});
    if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidInput, "affects relation needs nonempty source and target");
}

std::string given_text(const NodeSet& z, const NodeSet& w) {
    if (z.empty() && w.empty()) return "";
    if (w.empty()) return " given do(" + set_name(z) + ")";
    if (z.empty()) return " given " + set_name(w);
    return " given {do(" + set_name(z) + "), " + set_name(w) + "}";
}

}  // namespace

std::string relation_text(const AffectsRelation& r) {
    return set_name(r.source) + (r.holds ? " affects " : " does not affect ") + set_name(r.target) +
           given_text(r.do_given, r.obs_given);
}

std::vector<Assignment> assignments_of(const CausalModel& m, const NodeSet& s) {
    std::vector<Variable> vars;
    for (auto& n : m.graph.nodes())
        if (s.count(n.id)) {
            if (m.is_quantum(n.id)) throw Error(ErrorKind::InvalidInput, n.id + " is quantum and has no values");
            vars.push_back({n.id, m.card(n.id)});
        }
    if (vars.size() != s.size()) {
        for (auto& id : s) m.graph.index(id);  // throws UnknownNode
    }
    return all_assignments(vars);
}

Analyzer::Analyzer(CausalModel m) : model_(std::move(m)) {}

const JointDistribution& Analyzer::do_dist(const Assignment& iv) {
    auto it = cache_.find(iv);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(iv, full_distribution(model_, iv)).first->second;
}

const JointDistribution& Analyzer::observed() {
    if (!observed_) observed_ = marginal(do_dist({}), model_.graph.observed());
    return *observed_;
}

std::optional<JointDistribution> Analyzer::do_conditional(const Assignment& iv, const Assignment& evidence,
                                                          const NodeSet& y) {
    const JointDistribution& d = do_dist(iv);
    NodeSet keep = y;
    for (auto& [id, v] : evidence) keep.insert(id);
    return condition(marginal(d, keep), evidence);
}

bool Analyzer::ho_affects(const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
    require_relation_sets(x, y, z, w);
    auto xs = assignments_of(model_, x);
    auto zs = assignments_of(model_, z);
    auto ws = assignments_of(model_, w);
    for (auto& za : zs)
        for (auto& xa : xs) {
            Assignment xz = merge(xa, za);
            for (auto& wa : ws) {
                auto lhs = do_conditional(xz, merge(xz, wa), y);
                auto rhs = do_conditional(za, merge(za, wa), y);
                if (lhs.has_value() != rhs.has_value()) {
                    ++skips_;
                    continue;
                }
                if (lhs && !(*lhs == *rhs)) return true;
            }
        }
    return false;
}

bool Analyzer::is_reducible(const AffectsRelation& rel) {
    if (!rel.holds) throw Error(ErrorKind::NotAnAffectsRelation, relation_text(rel) + " does not hold");
    std::vector<std::string> xs(rel.source.begin(), rel.source.end());
    const unsigned full = (1u << xs.size()) - 1;
    for (unsigned mask = 1; mask < full; ++mask) {
        NodeSet s, rest;
        for (std::size_t i = 0; i < xs.size(); ++i) (mask >> i & 1u ? s : rest).insert(xs[i]);
        if (!ho_affects(s, rel.target, set_union(rel.do_given, rest), rel.obs_given)) return true;
    }
    return false;
}

bool Analyzer::is_irreducible(const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
    AffectsRelation r{x, y, z, w, true, std::nullopt};
    return !is_reducible(r);
}

AffectsRelation Analyzer::decide(const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
    AffectsRelation r{x, y, z, w, ho_affects(x, y, z, w), std::nullopt};
    if (r.holds) r.irreducible = !is_reducible(r);
    return r;
}

bool ho_affects(const CausalModel& m, const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
    Analyzer a(m);
    return a.ho_affects(x, y, z, w);
}

bool is_reducible(const CausalModel& m, const AffectsRelation& rel) {
    Analyzer a(m);
    return a.is_reducible(rel);
}

std::map<Edge, Arrow> classify_arrows(Analyzer& a) {
    const CausalGraph& g = a.model().graph;
    std::map<Edge, Arrow> out;
    for (auto& e : g.edges()) {
        if (g.node(e.first).visibility != Visibility::Observed || g.node(e.second).visibility != Visibility::Observed)
            continue;
        out[e] = a.ho_affects({e.first}, {e.second}) ? Arrow::Solid : Arrow::Dashed;
    }
    return out;
}

std::map<Edge, Arrow> classify_arrows(const CausalModel& m) {
    Analyzer a(m);
    return classify_arrows(a);
}

}  // namespace ccm

#include "ccm/loops.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "ccm/error.hpp"
#include "json_util.hpp"

namespace ccm {

AffectsSet AffectsSet::from_relations(const std::vector<AffectsRelation>& rels) {
    AffectsSet a;
    for (auto& r : rels) {
        if (!r.holds) continue;
        if (r.source.empty() || r.target.empty())
            throw Error(ErrorKind::InvalidInput, "affects relation needs nonempty source and target");
        require_disjoint({&r.source, &r.target, &r.do_given, &r.obs_given});
        a.relations.push_back(r);
    }
    return a;
}

AffectsSet AffectsSet::from_table(const AffectsTable& t) { return from_relations(t.relations); }

NodeSet AffectsSet::elements() const {
    NodeSet s;
    for (auto& r : relations)
        for (const NodeSet* p : {&r.source, &r.target, &r.do_given, &r.obs_given}) s.insert(p->begin(), p->end());
    return s;
}

std::string witness_text(const LoopWitness& w) {
    std::string s = w.type == 0 ? std::string("affects causal loop (cause-constraint oracle)")
                                : "Type " + std::to_string(w.type) + " affects causal loop";
    if (!w.chain.empty()) {
        s += ":";
        for (std::size_t i = 0; i < w.chain.size(); ++i) s += (i ? "; " : " ") + relation_text(w.chain[i]);
    }
    if (!w.notes.empty()) s += "\n  " + w.notes;
    return s;
}

std::string witness_to_json(const LoopWitness& w) {
    using jsonutil::json;
    json j;
    j["type"] = w.type == 0 ? json("oracle") : json(w.type);
    json chain = json::array();
    for (auto& r : w.chain) chain.push_back(relation_text(r));
    j["chain"] = chain;
    j["notes"] = w.notes;
    return j.dump(2) + "\n";
}

namespace {

bool zeroth(const AffectsRelation& r) { return r.do_given.empty() && r.obs_given.empty(); }
bool irreducible(const AffectsRelation& r) { return r.source.size() == 1 || r.irreducible.value_or(false); }
bool singleton(const AffectsRelation& r) { return r.source.size() == 1 && r.target.size() == 1; }

NodeSet intersect(const NodeSet& a, const NodeSet& b) {
    NodeSet s;
    for (auto& x : a)
        if (b.count(x)) s.insert(x);
    return s;
}

// First directed cycle (in index order) of the digraph on `n` vertices; returns vertex sequence.
std::optional<std::vector<int>> find_cycle(int n, const std::vector<std::vector<int>>& adj) {
    std::vector<int> color(n, 0), stack;
    std::optional<std::vector<int>> found;
    std::function<bool(int)> dfs = [&](int v) {
        color[v] = 1;
        stack.push_back(v);
        for (int u : adj[v]) {
            if (color[u] == 1) {
                auto it = std::find(stack.begin(), stack.end(), u);
                found = std::vector<int>(it, stack.end());
                return true;
            }
            if (color[u] == 0 && dfs(u)) return true;
        }
        stack.pop_back();
        color[v] = 2;
        return false;
    };
    for (int v = 0; v < n; ++v)
        if (color[v] == 0 && dfs(v)) return found;
    return std::nullopt;
}

// Searches chains of irreducible relations from a set P back into Q. Each step applies a relation
// whose source meets the current set; if the source does not contain the current set, the step is
// an incomplete node and needs a completion chain from the uncovered part back to the current set,
// searched one level shallower. Level 0 admits complete chains only.
class ChainFinder {
public:
    struct Found {
        std::vector<int> rels;
        std::vector<std::string> notes;
    };

    explicit ChainFinder(const std::vector<AffectsRelation>& rels) : rels_(rels) {}

    std::optional<Found> find(const NodeSet& p, const NodeSet& q, int level) {
        auto key = std::make_tuple(p, q, level);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        auto r = search(p, q, level);
        memo_[key] = r;
        return r;
    }

private:
    struct State {
        NodeSet current;
        int parent;
        int rel;
        std::vector<std::string> notes;
    };

    std::optional<Found> search(const NodeSet& p, const NodeSet& q, int level) {
        std::vector<State> states{{p, -1, -1, {}}};
        std::set<NodeSet> visited;
        visited.insert(p);
        std::deque<int> queue{0};
        while (!queue.empty()) {
            int si = queue.front();
            queue.pop_front();
            const NodeSet cur = states[si].current;
            for (std::size_t ri = 0; ri < rels_.size(); ++ri) {
                const AffectsRelation& r = rels_[ri];
                NodeSet meet = intersect(cur, r.source);
                if (meet.empty()) continue;
                std::vector<std::string> notes;
                if (meet != cur) {
                    if (level == 0) continue;
                    NodeSet rest = set_minus(cur, r.source);
                    auto completion = find(rest, cur, level - 1);
                    if (!completion) continue;
                    std::string n = "node (" + set_name(cur) + ", " + set_name(r.source) + ") completed from " +
                                    set_name(rest) + " by:";
                    for (int c : completion->rels) n += " [" + relation_text(rels_[c]) + "]";
                    notes.push_back(n);
                    for (auto& sub : completion->notes) notes.push_back("  " + sub);
                }
                int ni = static_cast<int>(states.size());
                states.push_back({r.target, si, static_cast<int>(ri), notes});
                if (subset_of(r.target, q)) return unwind(states, ni);
                if (visited.insert(r.target).second) queue.push_back(ni);
            }
        }
        return std::nullopt;
    }

    static Found unwind(const std::vector<State>& states, int i) {
        Found f;
        std::vector<int> seq;
        for (int k = i; states[k].parent >= 0; k = states[k].parent) seq.push_back(k);
        for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
            f.rels.push_back(states[*it].rel);
            for (auto& n : states[*it].notes) f.notes.push_back(n);
        }
        return f;
    }

    const std::vector<AffectsRelation>& rels_;
    std::map<std::tuple<NodeSet, NodeSet, int>, std::optional<Found>> memo_;
};

std::string join_notes(const std::vector<std::string>& notes) {
    std::string s;
    for (auto& n : notes) s += (s.empty() ? "" : "\n  ") + n;
    return s;
}

std::optional<LoopWitness> relation_cycle(const std::vector<AffectsRelation>& rels, int type,
                                          bool (*link)(const AffectsRelation&, const AffectsRelation&)) {
    const int n = static_cast<int>(rels.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (link(rels[i], rels[j])) adj[i].push_back(j);
    auto cyc = find_cycle(n, adj);
    if (!cyc) return std::nullopt;
    LoopWitness w{type, {}, ""};
    for (int i : *cyc) w.chain.push_back(rels[i]);
    return w;
}

// Loops built from an irreducible relation S1 affects S2 and complete chains from S2 back into S1.
// per_element: one chain per e2 in S2.
std::optional<LoopWitness> complete_chain_loop(const std::vector<AffectsRelation>& irr, int type, bool per_element) {
    ChainFinder finder(irr);
    for (auto& r0 : irr) {
        LoopWitness w{type, {r0}, ""};
        std::vector<std::string> notes;
        bool ok = true;
        std::vector<NodeSet> starts;
        if (per_element)
            for (auto& e : r0.target) starts.push_back({e});
        else
            starts.push_back(r0.target);
        for (auto& start : starts) {
            auto f = finder.find(start, r0.source, 0);
            if (!f) {
                ok = false;
                break;
            }
            std::string n = "chain from " + set_name(start) + ":";
            for (int c : f->rels) {
                n += " [" + relation_text(irr[c]) + "]";
                w.chain.push_back(irr[c]);
            }
            notes.push_back(n);
        }
        if (ok) {
            w.notes = join_notes(notes);
            return w;
        }
    }
    return std::nullopt;
}

constexpr std::size_t kChainBudget = 2000000;

// Incomplete-chain loops. For the chosen start s2 (the part of S2 met by the first relation), every
// chain of distinct relations from s2 back into S1 must have all of its incomplete nodes completed by
// a chain found one level shallower, and at least one such chain must exist.
class IncompleteLoopSearch {
public:
    IncompleteLoopSearch(const std::vector<AffectsRelation>& irr, int level) : irr_(irr), finder_(irr), level_(level) {}

    std::optional<LoopWitness> run(int type, bool per_element) {
        for (auto& r0 : irr_) {
            std::vector<NodeSet> starts;
            if (per_element) {
                for (auto& e : r0.target) starts.push_back({e});
            } else {
                std::set<NodeSet> seen;
                for (auto& r : irr_) {
                    NodeSet m = intersect(r0.target, r.source);
                    if (!m.empty() && seen.insert(m).second) starts.push_back(m);
                }
            }
            LoopWitness w{type, {r0}, ""};
            std::vector<std::string> notes;
            bool all_ok = !starts.empty(), any_ok = false;
            for (auto& s2 : starts) {
                auto c = check_start(r0, s2);
                if (c) {
                    any_ok = true;
                    std::string n = "chain from " + set_name(s2) + ":";
                    for (int ri : c->rels) {
                        n += " [" + relation_text(irr_[ri]) + "]";
                        w.chain.push_back(irr_[ri]);
                    }
                    notes.push_back(n);
                    for (auto& sub : c->notes) notes.push_back("  " + sub);
                    if (!per_element) break;
                } else if (per_element) {
                    all_ok = false;
                    break;
                }
            }
            if (per_element ? all_ok : any_ok) {
                w.notes = join_notes(notes);
                return w;
            }
        }
        return std::nullopt;
    }

private:
    struct Chain {
        std::vector<int> rels;
        std::vector<std::string> notes;
    };

    const std::vector<AffectsRelation>& irr_;
    ChainFinder finder_;
    int level_;
    std::size_t steps_ = 0;

    // Whether an incomplete step can be completed depends only on the current set and the relation,
    // and a walk reaching a set can be shortened to one with distinct relations, so "every chain" is
    // checked over the reachable (set, relation) steps instead of by enumerating chains.
    std::optional<Chain> check_start(const AffectsRelation& r0, const NodeSet& s2) {
        struct Step {
            NodeSet current;
            bool start;
            int parent;
            int rel;
            std::vector<std::string> notes;
        };
        std::vector<Step> states{{r0.target, true, -1, -1, {}}};
        std::set<std::pair<NodeSet, bool>> visited{{r0.target, true}};
        std::optional<int> first;
        std::deque<int> queue{0};
        while (!queue.empty()) {
            int si = queue.front();
            queue.pop_front();
            for (std::size_t ri = 0; ri < irr_.size(); ++ri) {
                if (++steps_ > kChainBudget)
                    throw Error(ErrorKind::SearchBudgetExceeded, "affects-chain enumeration budget exceeded");
                const NodeSet cur = states[si].current;
                const AffectsRelation& r = irr_[ri];
                NodeSet meet = intersect(cur, r.source);
                if (meet.empty() || (states[si].start && meet != s2)) continue;
                std::vector<std::string> notes;
                if (!subset_of(cur, r.source)) {
                    NodeSet rest = set_minus(cur, r.source);
                    auto completion = finder_.find(rest, cur, level_ - 1);
                    if (!completion) return std::nullopt;
                    std::string n = "node (" + set_name(cur) + ", " + set_name(r.source) + ") completed from " +
                                    set_name(rest) + " by:";
                    for (int c : completion->rels) n += " [" + relation_text(irr_[c]) + "]";
                    notes.push_back(n);
                    for (auto& sub : completion->notes) notes.push_back("  " + sub);
                }
                int ni = static_cast<int>(states.size());
                states.push_back({r.target, false, si, static_cast<int>(ri), std::move(notes)});
                if (subset_of(r.target, r0.source)) {
                    if (!first) first = ni;
                } else if (visited.insert({r.target, false}).second) {
                    queue.push_back(ni);
                }
            }
        }
        if (!first) return std::nullopt;
        Chain c;
        std::vector<int> seq;
        for (int k = *first; states[k].parent >= 0; k = states[k].parent) seq.push_back(k);
        for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
            c.rels.push_back(states[*it].rel);
            for (auto& n : states[*it].notes) c.notes.push_back(n);
        }
        return c;
    }
};
}  // namespace

std::optional<LoopWitness> detect_acl(const AffectsSet& a, int type) {
    std::vector<AffectsRelation> single, irr;
    for (auto& r : a.relations) {
        if (!r.holds || !zeroth(r)) continue;
        if (singleton(r)) single.push_back(r);
        if (irreducible(r)) irr.push_back(r);
    }
    switch (type) {
        case 1:
            for (auto& r : single)
                for (auto& s : single)
                    if (r.source == s.target && r.target == s.source) return LoopWitness{1, {r, s}, ""};
            return std::nullopt;
        case 2: {
            std::vector<std::string> ids;
            std::map<std::string, int> index;
            for (auto& r : single)
                for (auto* e : {&*r.source.begin(), &*r.target.begin()})
                    if (!index.count(*e)) {
                        index[*e] = static_cast<int>(ids.size());
                        ids.push_back(*e);
                    }
            std::vector<std::vector<int>> adj(ids.size());
            std::map<std::pair<int, int>, const AffectsRelation*> by_edge;
            for (auto& r : single) {
                int u = index[*r.source.begin()], v = index[*r.target.begin()];
                adj[u].push_back(v);
                by_edge[{u, v}] = &r;
            }
            auto cyc = find_cycle(static_cast<int>(ids.size()), adj);
            if (!cyc) return std::nullopt;
            LoopWitness w{2, {}, ""};
            for (std::size_t i = 0; i < cyc->size(); ++i)
                w.chain.push_back(*by_edge.at({(*cyc)[i], (*cyc)[(i + 1) % cyc->size()]}));
            return w;
        }
        case 3:
            for (auto& r : irr) {
                if (r.target.size() != 1) continue;
                for (auto& s : irr) {
                    if (s.target.size() != 1 || !disjoint(r.source, s.source)) continue;
                    if (s.source.count(*r.target.begin()) && r.source.count(*s.target.begin()))
                        return LoopWitness{3, {r, s}, ""};
                }
            }
            return std::nullopt;
        case 4:
            return relation_cycle(irr, 4, [](const AffectsRelation& x, const AffectsRelation& y) {
                return x.target == y.source;
            });
        case 5:
            return relation_cycle(irr, 5, [](const AffectsRelation& x, const AffectsRelation& y) {
                return subset_of(x.target, y.source);
            });
        case 6: return complete_chain_loop(irr, 6, true);
        case 7: return IncompleteLoopSearch(irr, 1).run(7, false);
        case 8: return IncompleteLoopSearch(irr, 1).run(8, true);
        default: throw Error(ErrorKind::InvalidInput, "loop type must be between 1 and 8");
    }
}

std::optional<LoopWitness> detect_acl_recursive(const AffectsSet& a, int max_depth) {
    if (max_depth < 1) throw Error(ErrorKind::InvalidInput, "max_depth must be at least 1");
    std::vector<AffectsRelation> irr;
    for (auto& r : a.relations)
        if (r.holds && zeroth(r) && irreducible(r)) irr.push_back(r);
    for (int d = 1; d <= max_depth; ++d) {
        IncompleteLoopSearch search(irr, d);
        if (auto w = search.run(d == 1 ? 7 : 9, false)) return w;
        if (auto w = search.run(d == 1 ? 8 : 10, true)) return w;
    }
    return std::nullopt;
}

}  // namespace ccm

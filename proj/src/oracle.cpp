#include <algorithm>
#include <set>

#include "ccm/error.hpp"
#include "ccm/loops.hpp"

namespace ccm {

namespace {

// A disjunction of "e is a cause of t" atoms; at least one must hold.
struct Constraint {
    std::vector<std::pair<int, int>> atoms;
    std::string origin;
};

class CauseSearch {
public:
    CauseSearch(int n, std::vector<Constraint> cs, std::size_t budget)
        : n_(n), cs_(std::move(cs)), budget_(budget), reach_(n, 0) {
        for (int i = 0; i < n_; ++i) reach_[i] = 1ull << i;
    }

    // True when some choice of atoms satisfies every constraint without a directed cycle.
    bool run() { return solve(0); }
    const std::vector<std::pair<int, int>>& chosen() const { return chosen_; }

private:
    bool reaches(int a, int b) const { return reach_[a] >> b & 1ull; }

    bool solve(std::size_t k) {
        if (++visited_ > budget_) throw Error(ErrorKind::SearchBudgetExceeded, "cause-constraint search budget exceeded");
        if (k == cs_.size()) return true;
        const Constraint& c = cs_[k];
        for (auto [e, t] : c.atoms)
            if (reaches(e, t)) return solve(k + 1);
        for (auto [e, t] : c.atoms) {
            if (reaches(t, e)) continue;  // would close a cycle
            auto saved = reach_;
            for (int v = 0; v < n_; ++v)
                if (reaches(v, e)) reach_[v] |= reach_[t];
            chosen_.push_back({e, t});
            if (solve(k + 1)) return true;
            chosen_.pop_back();
            reach_ = saved;
        }
        return false;
    }

    int n_;
    std::vector<Constraint> cs_;
    std::size_t budget_;
    std::size_t visited_ = 0;
    std::vector<unsigned long long> reach_;
    std::vector<std::pair<int, int>> chosen_;
};

std::string atoms_text(const std::vector<std::string>& ids, const Constraint& c) {
    std::set<int> froms, tos;
    for (auto [e, t] : c.atoms) {
        froms.insert(e);
        tos.insert(t);
    }
    auto names = [&](const std::set<int>& s) {
        NodeSet ns;
        for (int i : s) ns.insert(ids[i]);
        return set_name(ns);
    };
    if (froms.size() == 1) return ids[*froms.begin()] + " causes one of " + names(tos);
    return "one of " + names(froms) + " causes one of " + names(tos);
}

}  // namespace

CyclicityResult cyclicity_certificate(const AffectsSet& a, std::size_t budget) {
    NodeSet elems = a.elements();
    std::vector<std::string> ids(elems.begin(), elems.end());
    if (ids.size() > 64) throw Error(ErrorKind::InvalidInput, "too many elements for the cause-constraint search");
    auto idx = [&](const std::string& s) {
        return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), s) - ids.begin());
    };
    std::vector<Constraint> cs;
    std::set<std::vector<std::pair<int, int>>> seen;
    auto add = [&](Constraint c) {
        std::sort(c.atoms.begin(), c.atoms.end());
        if (seen.insert(c.atoms).second) cs.push_back(std::move(c));
    };
    for (auto& r : a.relations) {
        if (!r.holds) continue;
        NodeSet reach = set_union(r.target, r.obs_given);
        // Any holding relation: some source element causes some element of target or observed condition.
        Constraint set_level{{}, relation_text(r)};
        for (auto& e : r.source)
            for (auto& t : reach) set_level.atoms.push_back({idx(e), idx(t)});
        add(set_level);
        // Irreducible relations: every source element causes some such element.
        if (r.irreducible.value_or(false) && r.source.size() > 1)
            for (auto& e : r.source) {
                Constraint c{{}, relation_text(r) + " (irreducible)"};
                for (auto& t : reach) c.atoms.push_back({idx(e), idx(t)});
                add(c);
            }
    }
    std::stable_sort(cs.begin(), cs.end(),
                     [](const Constraint& x, const Constraint& y) { return x.atoms.size() < y.atoms.size(); });
    CauseSearch search(static_cast<int>(ids.size()), cs, budget);
    CyclicityResult res;
    if (search.run()) {
        res.cyclic = false;
        for (auto [e, t] : search.chosen()) res.acyclic_witness.push_back({ids[e], ids[t]});
        res.explanation = "Unknown: an acyclic cause relation satisfies all " + std::to_string(cs.size()) +
                          " derived constraints";
        return res;
    }
    res.cyclic = true;
    res.explanation = "Cyclic: every cause relation satisfying the derived constraints has a directed cycle;";
    for (auto& c : cs) res.explanation += "\n  " + atoms_text(ids, c) + "  <- " + c.origin;
    return res;
}

bool hidden_loop_check(const CausalModel& m, const CausalModel& candidate) {
    if (m.graph.is_acyclic()) throw Error(ErrorKind::NotCyclic, "model '" + m.name + "' has no directed cycle");
    if (!candidate.graph.is_acyclic()) return false;
    Analyzer am(m), ac(candidate);
    const JointDistribution& pm = am.observed();
    const JointDistribution& pc = ac.observed();
    if (pm.ids() != pc.ids()) return false;
    for (auto& v : pm.variables())
        if (pc.card(v.id) != v.card) return false;
    for (auto& asg : all_assignments(pm.variables()))
        if (pm.prob(asg) != pc.prob(asg)) return false;
    int max_set = std::max<int>(1, static_cast<int>(pm.ids().size()) - 1);
    auto tm = affects_table(am, max_set), tc = affects_table(ac, max_set);
    if (tm.relations.size() != tc.relations.size()) return false;
    for (std::size_t i = 0; i < tm.relations.size(); ++i) {
        const auto &x = tm.relations[i], &y = tc.relations[i];
        if (!x.same_sets(y) || x.holds != y.holds || x.irreducible != y.irreducible) return false;
    }
    return true;
}

}  // namespace ccm

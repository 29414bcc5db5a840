#include <algorithm>
#include <bitset>
#include <numeric>

#include "ccm/error.hpp"
#include "ccm/spacetime.hpp"

namespace ccm {

// In (1+1) dimensions with light-cone coordinates u = t + x, v = t - x, the joint future of a set T
// is the future of (max u, max v). A relation S1 affects T is therefore satisfied iff for every
// s in S1 some t in T has u_t >= u_s, and independently some t' in T has v_t' >= v_s. Picking the
// achiever of each maximum ("a branch") turns one coordinate into a system of difference constraints
// whose feasible solutions can separate exactly the pairs in different strongly connected components.

namespace {

constexpr int kMaxVars = 64;
using PairMask = std::bitset<kMaxVars * (kMaxVars - 1) / 2>;

struct Choice {
    int s;
    std::vector<int> options;
    const AffectsRelation* origin;
};

struct Branch {
    std::vector<int> pick;
    PairMask forced;
};

std::vector<unsigned long long> closure(int n, const std::vector<Choice>& cs, const std::vector<int>& pick) {
    std::vector<unsigned long long> reach(n);
    for (int i = 0; i < n; ++i) reach[i] = 1ull << i;
    for (std::size_t k = 0; k < cs.size(); ++k) reach[cs[k].s] |= 1ull << cs[k].options[pick[k]];
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            unsigned long long r = reach[i];
            for (int j = 0; j < n; ++j)
                if (r >> j & 1ull) r |= reach[j];
            if (r != reach[i]) {
                reach[i] = r;
                changed = true;
            }
        }
    }
    return reach;
}

// Distinct integer coordinates, equal exactly within strongly connected components, monotone along edges.
std::vector<long> ranks(int n, const std::vector<unsigned long long>& reach) {
    std::vector<int> ancestors(n, 0), rep(n);
    for (int i = 0; i < n; ++i) {
        rep[i] = i;
        for (int j = 0; j < n; ++j) {
            if (reach[j] >> i & 1ull) ++ancestors[i];
            if (j < rep[i] && (reach[j] >> i & 1ull) && (reach[i] >> j & 1ull)) rep[i] = j;
        }
    }
    std::vector<int> reps;
    for (int i = 0; i < n; ++i)
        if (rep[i] == i) reps.push_back(i);
    std::sort(reps.begin(), reps.end(), [&](int x, int y) {
        return std::make_pair(ancestors[x], x) < std::make_pair(ancestors[y], y);
    });
    std::vector<long> pos(n);
    for (std::size_t k = 0; k < reps.size(); ++k) pos[reps[k]] = static_cast<long>(k);
    std::vector<long> out(n);
    for (int i = 0; i < n; ++i) out[i] = pos[rep[i]];
    return out;
}

}  // namespace

EmbedSearchResult find_embedding_1p1(const AffectsSet& a, Requirement req, std::size_t budget) {
    NodeSet elems = a.elements();
    std::vector<std::string> ids(elems.begin(), elems.end());
    const int n = static_cast<int>(ids.size());
    if (n > kMaxVars) throw Error(ErrorKind::InvalidInput, "too many variables for the embedding search");
    auto idx = [&](const std::string& s) {
        return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), s) - ids.begin());
    };
    auto pair_index = [&](int i, int j) {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i * (2 * n - i - 1) / 2 + (j - i - 1));
    };

    std::vector<Choice> cs;
    std::vector<const AffectsRelation*> imposing;
    for (auto& r : a.relations) {
        if (!imposes_constraint(r)) continue;
        imposing.push_back(&r);
        NodeSet rest = set_union(set_union(r.target, r.do_given), r.obs_given);
        for (auto& s : r.source) {
            Choice c{idx(s), {}, &r};
            for (auto& t : rest) c.options.push_back(idx(t));
            bool dup = std::any_of(cs.begin(), cs.end(),
                                   [&](const Choice& o) { return o.s == c.s && o.options == c.options; });
            if (!dup) cs.push_back(std::move(c));
        }
    }

    PairMask required;
    std::vector<std::pair<int, int>> required_pairs;
    auto require = [&](int i, int j) {
        if (i == j || required.test(pair_index(i, j))) return;
        required.set(pair_index(i, j));
        required_pairs.push_back({std::min(i, j), std::max(i, j)});
    };
    if (req == Requirement::Nondegenerate) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) require(i, j);
    } else {
        for (auto& r : a.relations)
            if (r.holds && r.source.size() == 1 && r.target.size() == 1 && r.do_given.empty() && r.obs_given.empty())
                require(idx(*r.source.begin()), idx(*r.target.begin()));
    }

    auto forced_of = [&](const std::vector<unsigned long long>& reach) {
        PairMask f;
        for (auto [i, j] : required_pairs)
            if ((reach[i] >> j & 1ull) && (reach[j] >> i & 1ull)) f.set(pair_index(i, j));
        return f;
    };

    // Enumerate branches, keeping an antichain of minimal forced-equality sets.
    std::vector<Branch> minimal;
    std::vector<int> pick(cs.size(), 0);
    std::size_t visited = 0;
    bool done = false;
    while (!done) {
        if (++visited > budget) throw Error(ErrorKind::SearchBudgetExceeded, "embedding search budget exceeded");
        PairMask f = forced_of(closure(n, cs, pick));
        bool dominated = std::any_of(minimal.begin(), minimal.end(),
                                     [&](const Branch& b) { return (b.forced & ~f).none(); });
        if (!dominated) {
            minimal.erase(std::remove_if(minimal.begin(), minimal.end(),
                                         [&](const Branch& b) { return (f & ~b.forced).none(); }),
                          minimal.end());
            minimal.push_back({pick, f});
            if (f.none()) break;
        }
        std::size_t k = 0;
        while (k < cs.size() && ++pick[k] == static_cast<int>(cs[k].options.size())) pick[k++] = 0;
        done = k == cs.size();
    }

    EmbedSearchResult res;
    for (auto& bu : minimal)
        for (auto& bv : minimal) {
            if ((bu.forced & bv.forced).any()) continue;
            auto u = ranks(n, closure(n, cs, bu.pick));
            auto v = ranks(n, closure(n, cs, bv.pick));
            res.sat = true;
            res.embedding.poset = Poset::minkowski(1);
            for (int i = 0; i < n; ++i)
                res.embedding.locations[ids[i]] =
                    Location{"", {Rational(u[i] + v[i], 2), Rational(u[i] - v[i], 2)}};
            for (auto& [id, l] : res.embedding.locations)
                for (auto& c : l.point) c.canonicalize();
            return res;
        }

    PairMask always;
    always.set();
    for (auto& b : minimal) always &= b.forced;
    const std::string what = req == Requirement::Nontrivial ? "nontrivial" : "nondegenerate";
    std::optional<std::pair<int, int>> culprit;
    for (auto [i, j] : required_pairs)
        if (always.test(pair_index(i, j))) {
            culprit = std::make_pair(i, j);
            break;
        }
    if (culprit) {
        const std::string &x = ids[culprit->first], &y = ids[culprit->second];
        res.reason = "no " + what + " embedding in M(1+1): compatibility forces " + x + " and " + y +
                     " to share a location";
        for (auto* r : imposing) {
            NodeSet all = set_union(set_union(r->source, r->target), set_union(r->do_given, r->obs_given));
            if (all.count(x) || all.count(y)) res.blocking.push_back(*r);
        }
    } else {
        res.reason = "no " + what + " embedding in M(1+1): every way of meeting the compatibility constraints "
                     "makes some required pair of variables share a location";
        for (auto* r : imposing) res.blocking.push_back(*r);
    }
    return res;
}

}  // namespace ccm

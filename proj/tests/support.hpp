#pragma once

// Shared helpers for the unit tests: corpus access, random model generation and
// brute-force oracles that do not go through the library's evaluation code.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ccm/corpus.hpp"
#include "ccm/model_io.hpp"

namespace testing {

using ccm::Assignment;
using ccm::NodeSet;
using ccm::Rational;

inline std::string corpus_path(const std::string& name) { return std::string(CCM_TEST_CORPUS_DIR) + "/" + name + ".json"; }

inline ccm::CausalModel corpus_model(const std::string& name) { return *ccm::load_entry(CCM_TEST_CORPUS_DIR, name).model; }
inline ccm::AffectsSet corpus_set(const std::string& name) { return *ccm::load_entry(CCM_TEST_CORPUS_DIR, name).set; }

// "AB" -> {A, B}
inline NodeSet S(const std::string& ids) {
    NodeSet s;
    for (char c : ids) s.insert(std::string(1, c));
    return s;
}

// ---- d-separation by explicit path enumeration ------------------------------------------

struct PlainGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    bool edge(int a, int b) const {
        for (auto& e : edges)
            if (e.first == a && e.second == b) return true;
        return false;
    }
    std::set<int> descendants_incl(int v) const {
        std::set<int> seen{v};
        std::vector<int> stack{v};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto& e : edges)
                if (e.first == u && seen.insert(e.second).second) stack.push_back(e.second);
        }
        return seen;
    }
};

// A simple path between x and y in the skeleton is open given z when every collider on it has a
// descendant (itself included) in z and no non-collider is in z.
// Simple paths are enumerated together with the orientation of every edge they use, so a
// two-cycle between neighbours yields both a collider and a non-collider reading.
inline bool oracle_dconnected(const PlainGraph& g, int x, int y, const std::set<int>& z) {
    std::vector<int> path{x};
    std::vector<bool> forward;  // forward[i]: the i-th step follows path[i] -> path[i+1]
    std::vector<bool> on(g.n, false);
    on[x] = true;
    std::function<bool()> extend = [&]() -> bool {
        int u = path.back();
        if (u == y) {
            for (std::size_t i = 1; i + 1 < path.size(); ++i) {
                int b = path[i];
                bool collider = forward[i - 1] && !forward[i];
                if (collider) {
                    bool open = false;
                    for (int d : g.descendants_incl(b)) open |= z.count(d) > 0;
                    if (!open) return false;
                } else if (z.count(b)) {
                    return false;
                }
            }
            return true;
        }
        for (int v = 0; v < g.n; ++v) {
            if (on[v]) continue;
            for (bool dir : {true, false}) {
                if (dir ? !g.edge(u, v) : !g.edge(v, u)) continue;
                on[v] = true;
                path.push_back(v);
                forward.push_back(dir);
                bool ok = extend();
                forward.pop_back();
                path.pop_back();
                on[v] = false;
                if (ok) return true;
            }
        }
        return false;
    };
    return extend();
}

inline bool oracle_dseparated(const PlainGraph& g, const std::set<int>& x, const std::set<int>& y,
                              const std::set<int>& z) {
    for (int a : x)
        for (int b : y)
            if (oracle_dconnected(g, a, b, z)) return false;
    return true;
}

inline std::string node_name(int i) { return std::string(1, static_cast<char>('A' + i)); }

inline PlainGraph random_graph(std::mt19937_64& rng, int n, double p, bool allow_cycles) {
    PlainGraph g;
    g.n = n;
    std::bernoulli_distribution coin(p);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            if (!allow_cycles && a > b) continue;
            if (coin(rng)) g.edges.push_back({a, b});
        }
    return g;
}

inline ccm::CausalGraph to_causal_graph(const PlainGraph& g) {
    std::vector<ccm::Node> nodes;
    for (int i = 0; i < g.n; ++i) nodes.push_back({node_name(i)});
    std::vector<ccm::Edge> edges;
    for (auto& [a, b] : g.edges) edges.push_back({node_name(a), node_name(b)});
    return ccm::CausalGraph(nodes, edges);
}

// ---- random acyclic table models with an enumeration oracle --------------------------------

struct TableModel {
    PlainGraph g;
    std::vector<int> card;
    std::vector<bool> latent;
    std::vector<std::vector<int>> parents;           // ascending
    std::vector<std::vector<Rational>> prior;       // exogenous nodes
    std::vector<std::vector<int>> rows;             // endogenous nodes, first parent most significant

    std::string json_text() const {
        nlohmann::ordered_json j;
        j["name"] = "random";
        j["nodes"] = nlohmann::ordered_json::array();
        for (int i = 0; i < g.n; ++i)
            j["nodes"].push_back({{"name", node_name(i)},
                                  {"visibility", latent[i] ? "latent" : "observed"},
                                  {"sort", "classical"},
                                  {"card", card[i]}});
        j["edges"] = nlohmann::ordered_json::array();
        for (auto& [a, b] : g.edges) j["edges"].push_back({node_name(a), node_name(b)});
        j["mechanisms"] = nlohmann::ordered_json::object();
        j["exogenous"] = nlohmann::ordered_json::object();
        for (int i = 0; i < g.n; ++i) {
            if (parents[i].empty()) {
                std::vector<std::string> ps;
                for (auto& q : prior[i]) ps.push_back(q.get_str());
                j["exogenous"][node_name(i)] = {{"dist", ps}};
            } else {
                std::vector<std::string> pn;
                for (int p : parents[i]) pn.push_back(node_name(p));
                j["mechanisms"][node_name(i)] = {{"kind", "table"}, {"parents", pn}, {"rows", rows[i]}};
            }
        }
        return j.dump();
    }

    // Joint over all nodes by direct enumeration; `fixed` overrides mechanisms (interventions).
    std::map<std::vector<int>, Rational> joint(const std::map<int, int>& fixed = {}) const {
        std::map<std::vector<int>, Rational> out;
        std::vector<int> exo;
        for (int i = 0; i < g.n; ++i)
            if (parents[i].empty() && !fixed.count(i)) exo.push_back(i);
        std::vector<int> vals(g.n, 0);
        std::function<void(std::size_t, Rational)> rec = [&](std::size_t k, Rational w) {
            if (w == 0) return;
            if (k == exo.size()) {
                std::vector<int> v = vals;
                for (int i = 0; i < g.n; ++i) {  // node order is topological
                    if (fixed.count(i)) {
                        v[i] = fixed.at(i);
                    } else if (!parents[i].empty()) {
                        int idx = 0;
                        for (int p : parents[i]) idx = idx * card[p] + v[p];
                        v[i] = rows[i][idx];
                    }
                }
                out[v] += w;
                return;
            }
            int i = exo[k];
            for (int a = 0; a < card[i]; ++a) {
                vals[i] = a;
                rec(k + 1, w * prior[i][a]);
            }
        };
        rec(0, Rational(1));
        return out;
    }
};

inline TableModel random_table_model(std::mt19937_64& rng, int n, double p) {
    TableModel m;
    m.g = random_graph(rng, n, p, false);
    m.card.assign(n, 2);
    m.latent.assign(n, false);
    m.parents.assign(n, {});
    m.prior.assign(n, {});
    m.rows.assign(n, {});
    std::uniform_int_distribution<int> small(1, 4);
    for (auto& [a, b] : m.g.edges) m.parents[b].push_back(a);
    for (int i = 0; i < n; ++i) {
        std::sort(m.parents[i].begin(), m.parents[i].end());
        if (m.parents[i].empty()) {
            if (rng() % 4 == 0) m.card[i] = 3;
            std::vector<int> w;
            int total = 0;
            for (int a = 0; a < m.card[i]; ++a) total += w.emplace_back(small(rng));
            for (int a = 0; a < m.card[i]; ++a) m.prior[i].push_back(Rational(w[a], total));
            for (auto& q : m.prior[i]) q.canonicalize();
            m.latent[i] = m.card[i] == 2 && rng() % 3 == 0;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (m.parents[i].empty()) continue;
        int size = 1;
        for (int p : m.parents[i]) size *= m.card[p];
        for (int r = 0; r < size; ++r) m.rows[i].push_back(static_cast<int>(rng() % 2));
    }
    return m;
}

// Marginal of an oracle joint onto the given node indices, keyed by their values in that order.
inline std::map<std::vector<int>, Rational> oracle_marginal(const std::map<std::vector<int>, Rational>& joint,
                                                            const std::vector<int>& keep) {
    std::map<std::vector<int>, Rational> out;
    for (auto& [v, w] : joint) {
        std::vector<int> k;
        for (int i : keep) k.push_back(v[i]);
        out[k] += w;
    }
    return out;
}

// ---- two-qubit Born rule ----------------------------------------------------------------

// P(x, y | a, b) for the Bell state (|00> + |11>)/sqrt2 with the computational basis for setting 0
// and the Hadamard basis for setting 1 on each side.
inline double bell_born(int a, int b, int x, int y) {
    auto vec = [](int setting, int outcome) -> std::array<double, 2> {
        if (setting == 0) return outcome == 0 ? std::array<double, 2>{1, 0} : std::array<double, 2>{0, 1};
        double s = 1 / std::sqrt(2.0);
        return outcome == 0 ? std::array<double, 2>{s, s} : std::array<double, 2>{s, -s};
    };
    auto u = vec(a, x), v = vec(b, y);
    double amp = (u[0] * v[0] + u[1] * v[1]) / std::sqrt(2.0);  // <u v | psi>
    return amp * amp;
}

}  // namespace testing

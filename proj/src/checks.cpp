#include "ccm/checks.hpp"

#include <algorithm>

#include "ccm/error.hpp"

namespace ccm {

bool CITriple::operator<(const CITriple& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
}

std::string triple_text(const CITriple& t, const char* rel) {
    std::string s = set_name(t.x) + " " + rel + " " + set_name(t.y);
    if (!t.z.empty()) s += " | " + set_name(t.z);
    return s;
}

std::vector<CITriple> disjoint_triples(const NodeSet& universe, std::size_t max_total) {
    std::vector<std::string> ids(universe.begin(), universe.end());
    const std::size_t n = ids.size();
    std::vector<CITriple> out;
    std::vector<int> role(n, 0);  // 0 none, 1 x, 2 y, 3 z
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 4;
    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t c = code;
        CITriple t;
        unsigned xm = 0, ym = 0;
        for (std::size_t i = 0; i < n; ++i) {
            int r = static_cast<int>(c % 4);
            c /= 4;
            if (r == 1) {
                t.x.insert(ids[i]);
                xm |= 1u << i;
            } else if (r == 2) {
                t.y.insert(ids[i]);
                ym |= 1u << i;
            } else if (r == 3) {
                t.z.insert(ids[i]);
            }
        }
        if (t.x.empty() || t.y.empty() || xm > ym) continue;
        if (t.x.size() + t.y.size() + t.z.size() > max_total) continue;
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const CITriple& a, const CITriple& b) {
        std::size_t sa = a.x.size() + a.y.size() + a.z.size(), sb = b.x.size() + b.y.size() + b.z.size();
        if (sa != sb) return sa < sb;
        return a < b;
    });
    return out;
}

ModelReport check_dsep_property(const CausalGraph& g, const JointDistribution& observed) {
    ModelReport r;
    for (auto& t : disjoint_triples(observed.ids())) {
        if (!d_separated(g, t.x, t.y, t.z)) continue;
        if (!cond_independent(observed, t.x, t.y, t.z))
            r.violations.push_back({"dsep_without_ci", t, triple_text(t, "_|_d") + " but dependent"});
    }
    return r;
}

ModelReport check_dsep_property(const CausalModel& m) { return check_dsep_property(m.graph, observed_distribution(m)); }

bool check_markov_factorization(const CausalGraph& g, const JointDistribution& full) {
    if (!g.is_acyclic()) throw Error(ErrorKind::NotAcyclic, "Markov factorization needs an acyclic graph");
    for (auto& n : g.nodes())
        if (n.sort != Sort::Classical) throw Error(ErrorKind::NotClassical, n.id + " is quantum");
    struct Factor {
        JointDistribution family, parents;
        std::vector<int> fam_pos, par_pos;
    };
    std::vector<Factor> factors;
    for (auto& n : g.nodes()) {
        NodeSet pa = g.parents(n.id);
        NodeSet fam = pa;
        fam.insert(n.id);
        Factor f{marginal(full, fam), marginal(full, pa), {}, {}};
        for (auto& v : f.family.variables()) f.fam_pos.push_back(full.position(v.id));
        for (auto& v : f.parents.variables()) f.par_pos.push_back(full.position(v.id));
        factors.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < full.size(); ++i) {
        auto vals = full.decode(i);
        Rational prod = 1;
        for (auto& f : factors) {
            std::vector<int> fv, pv;
            for (int p : f.fam_pos) fv.push_back(vals[p]);
            for (int p : f.par_pos) pv.push_back(vals[p]);
            const Rational& pp = f.parents.at(pv);
            if (pp == 0) {
                prod = 0;
                break;
            }
            prod *= f.family.at(fv) / pp;
        }
        if (prod != full.weights()[i]) return false;
    }
    return true;
}

bool check_markov_factorization(const CausalModel& m) {
    if (!m.graph.is_acyclic()) throw Error(ErrorKind::NotAcyclic, "Markov factorization needs an acyclic graph");
    if (m.has_quantum()) throw Error(ErrorKind::NotClassical, "model has quantum nodes");
    return check_markov_factorization(m.graph, full_distribution(m));
}

std::vector<CITriple> fine_tuned_independences(const CausalGraph& g, const JointDistribution& observed) {
    std::vector<CITriple> out;
    for (auto& t : disjoint_triples(observed.ids()))
        if (cond_independent(observed, t.x, t.y, t.z) && !d_separated(g, t.x, t.y, t.z)) out.push_back(t);
    return out;
}

std::vector<CITriple> fine_tuned_independences(const CausalModel& m) {
    return fine_tuned_independences(m.graph, observed_distribution(m));
}

std::vector<CITriple> implied_independences(const CausalGraph& g, const CITriple& base, const NodeSet& s) {
    require_disjoint({&base.x, &base.y, &base.z, &s});
    if (s.empty()) throw Error(ErrorKind::PreconditionFailed, "padding set is empty");
    for (const NodeSet* si : {&base.x, &base.y, &base.z}) {
        if (si->empty()) continue;
        if (!d_separated(g, s, *si, {}))
            throw Error(ErrorKind::PreconditionFailed, set_name(s) + " is not d-separated from " + set_name(*si));
    }
    return {CITriple{set_union(base.x, s), base.y, base.z}, CITriple{base.x, set_union(base.y, s), base.z},
            CITriple{base.x, base.y, set_union(base.z, s)}};
}

// ---- NS3' -------------------------------------------------------------------------

TripartiteConditional::TripartiteConditional(std::array<int, 3> settings, std::array<int, 3> outcomes,
                                             std::vector<Rational> table)
    : settings_(settings), outcomes_(outcomes), table_(std::move(table)) {
    std::size_t n = 1;
    for (int k = 0; k < 3; ++k) {
        if (settings_[k] < 1 || outcomes_[k] < 1) throw Error(ErrorKind::MalformedConditional, "empty alphabet");
        n *= static_cast<std::size_t>(settings_[k]) * static_cast<std::size_t>(outcomes_[k]);
    }
    if (table_.size() != n) throw Error(ErrorKind::MalformedConditional, "table size mismatch");
}

const Rational& TripartiteConditional::p(int a, int b, int c, int x, int y, int z) const {
    std::size_t idx = static_cast<std::size_t>(a);
    idx = idx * settings_[1] + b;
    idx = idx * settings_[2] + c;
    idx = idx * outcomes_[0] + x;
    idx = idx * outcomes_[1] + y;
    idx = idx * outcomes_[2] + z;
    return table_[idx];
}

void TripartiteConditional::validate() const {
    for (int a = 0; a < settings_[0]; ++a)
        for (int b = 0; b < settings_[1]; ++b)
            for (int c = 0; c < settings_[2]; ++c) {
                Rational total = 0;
                for (int x = 0; x < outcomes_[0]; ++x)
                    for (int y = 0; y < outcomes_[1]; ++y)
                        for (int z = 0; z < outcomes_[2]; ++z) {
                            const Rational& v = p(a, b, c, x, y, z);
                            if (v < 0) throw Error(ErrorKind::MalformedConditional, "negative entry");
                            total += v;
                        }
                if (total != 1)
                    throw Error(ErrorKind::MalformedConditional,
                                "setting (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                                    ") is not normalized");
            }
}

TripartiteConditional TripartiteConditional::from_joint(const JointDistribution& d,
                                                        const std::array<std::string, 3>& settings,
                                                        const std::array<std::string, 3>& outcomes) {
    std::array<int, 3> sc{}, oc{};
    for (int k = 0; k < 3; ++k) {
        sc[k] = d.card(settings[k]);
        oc[k] = d.card(outcomes[k]);
    }
    std::vector<Rational> table;
    for (int a = 0; a < sc[0]; ++a)
        for (int b = 0; b < sc[1]; ++b)
            for (int c = 0; c < sc[2]; ++c) {
                Assignment ev{{settings[0], a}, {settings[1], b}, {settings[2], c}};
                auto cond = condition(d, ev);
                if (!cond) throw Error(ErrorKind::MalformedConditional, "setting triple with zero probability");
                auto out = marginal(*cond, NodeSet(outcomes.begin(), outcomes.end()));
                for (int x = 0; x < oc[0]; ++x)
                    for (int y = 0; y < oc[1]; ++y)
                        for (int z = 0; z < oc[2]; ++z)
                            table.push_back(out.prob({{outcomes[0], x}, {outcomes[1], y}, {outcomes[2], z}}));
            }
    return TripartiteConditional(sc, oc, std::move(table));
}

bool check_ns3prime(const TripartiteConditional& p) {
    p.validate();
    auto [na, nb, nc] = p.settings();
    auto [nx, ny, nz] = p.outcomes();
    auto pxy = [&](int a, int b, int c, int x, int y) {
        Rational s = 0;
        for (int z = 0; z < nz; ++z) s += p.p(a, b, c, x, y, z);
        return s;
    };
    auto pyz = [&](int a, int b, int c, int y, int z) {
        Rational s = 0;
        for (int x = 0; x < nx; ++x) s += p.p(a, b, c, x, y, z);
        return s;
    };
    auto px = [&](int a, int b, int c, int x) {
        Rational s = 0;
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) s += p.p(a, b, c, x, y, z);
        return s;
    };
    auto pz = [&](int a, int b, int c, int z) {
        Rational s = 0;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) s += p.p(a, b, c, x, y, z);
        return s;
    };
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            for (int c = 0; c < nc; ++c) {
                // Compare every setting triple against the reference with the free settings at 0.
                for (int x = 0; x < nx; ++x)
                    for (int y = 0; y < ny; ++y)
                        if (pxy(a, b, c, x, y) != pxy(a, b, 0, x, y)) return false;
                for (int y = 0; y < ny; ++y)
                    for (int z = 0; z < nz; ++z)
                        if (pyz(a, b, c, y, z) != pyz(0, b, c, y, z)) return false;
                for (int x = 0; x < nx; ++x)
                    if (px(a, b, c, x) != px(a, 0, 0, x)) return false;
                for (int z = 0; z < nz; ++z)
                    if (pz(a, b, c, z) != pz(0, 0, c, z)) return false;
            }
    return true;
}

}  // namespace ccm

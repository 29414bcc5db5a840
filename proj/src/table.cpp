#include <algorithm>
#include <sstream>

#include "ccm/affects.hpp"
#include "ccm/error.hpp"

namespace ccm {

std::vector<SetQuad> affects_quads(const NodeSet& universe, int max_set) {
    if (max_set < 1) throw Error(ErrorKind::InvalidInput, "max_set must be at least 1");
    std::vector<std::string> ids(universe.begin(), universe.end());
    const std::size_t n = ids.size();
    const std::size_t cap = static_cast<std::size_t>(max_set);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 5;
    std::vector<SetQuad> out;
    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t c = code;
        SetQuad q;
        for (std::size_t i = 0; i < n; ++i) {
            switch (c % 5) {
                case 1: q.x.insert(ids[i]); break;
                case 2: q.y.insert(ids[i]); break;
                case 3: q.z.insert(ids[i]); break;
                case 4: q.w.insert(ids[i]); break;
                default: break;
            }
            c /= 5;
        }
        if (q.x.empty() || q.y.empty() || q.x.size() > cap || q.y.size() > cap) continue;
        if (q.z.size() + q.w.size() > cap) continue;
        out.push_back(std::move(q));
    }
    auto key = [](const SetQuad& q) {
        return std::make_tuple(q.z.size() + q.w.size(), q.z.size(), q.x.size() + q.y.size(), q.x.size(), q.x, q.y, q.z,
                               q.w);
    };
    std::sort(out.begin(), out.end(), [&](const SetQuad& a, const SetQuad& b) { return key(a) < key(b); });
    return out;
}

AffectsTable affects_table(Analyzer& a, int max_set) {
    const CausalModel& m = a.model();
    AffectsTable t;
    t.model = m.name;
    NodeSet obs = m.graph.observed();
    for (auto& q : affects_quads(obs, max_set)) t.relations.push_back(a.decide(q.x, q.y, q.z, q.w));
    const JointDistribution& p = a.observed();
    for (auto& tr : disjoint_triples(obs)) {
        t.dseps.emplace_back(tr, d_separated(m.graph, tr.x, tr.y, tr.z));
        t.cis.emplace_back(tr, cond_independent(p, tr.x, tr.y, tr.z));
    }
    return t;
}

AffectsTable affects_table(const CausalModel& m, int max_set) {
    Analyzer a(m);
    return affects_table(a, max_set);
}

std::string render_table_text(const AffectsTable& t) {
    std::ostringstream os;
    std::size_t width = 0;
    for (auto& [tr, v] : t.dseps) width = std::max(width, triple_text(tr).size());
    for (auto& r : t.relations) width = std::max(width, relation_text(r).size());
    auto pad = [&](const std::string& s) { return s + std::string(width + 2 - s.size(), ' '); };
    os << "model: " << (t.model.empty() ? "(unnamed)" : t.model) << "\n\n";
    os << pad("triple") << "d-separated  independent\n";
    for (std::size_t i = 0; i < t.dseps.size(); ++i) {
        os << pad(triple_text(t.dseps[i].first)) << (t.dseps[i].second ? "yes" : "no ") << "          "
           << (t.cis[i].second ? "yes" : "no") << "\n";
    }
    os << "\n" << pad("affects relation") << "irreducible\n";
    for (auto& r : t.relations) {
        os << pad(relation_text(r));
        if (r.irreducible) os << (*r.irreducible ? "yes" : "no");
        else os << "-";
        os << "\n";
    }
    return os.str();
}

}  // namespace ccm

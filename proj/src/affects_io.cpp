#include "ccm/affects.hpp"
#include "json_util.hpp"

namespace ccm {

using namespace jsonutil;

namespace {

json relation_json(const AffectsRelation& r) {
    json j;
    j["from"] = node_set_json(r.source);
    j["to"] = node_set_json(r.target);
    j["do"] = node_set_json(r.do_given);
    j["given"] = node_set_json(r.obs_given);
    j["holds"] = r.holds;
    j["irreducible"] = r.irreducible ? json(*r.irreducible) : json("unknown");
    return j;
}

json triple_json(const CITriple& t, const char* flag, bool v) {
    json j;
    j["x"] = node_set_json(t.x);
    j["y"] = node_set_json(t.y);
    j["z"] = node_set_json(t.z);
    j[flag] = v;
    return j;
}

}  // namespace

std::string relations_to_json(const std::vector<AffectsRelation>& rels) {
    json a = json::array();
    for (auto& r : rels) a.push_back(relation_json(r));
    return a.dump(2) + "\n";
}

std::vector<AffectsRelation> parse_relations(const std::string& json_text) {
    json j = parse_text(json_text);
    if (j.is_object() && j.contains("relations")) j = j.at("relations");
    if (!j.is_array()) bad("affects set must be an array of relation records");
    std::vector<AffectsRelation> out;
    for (auto& rj : j) {
        AffectsRelation r;
        r.source = node_set(field(rj, "from"));
        r.target = node_set(field(rj, "to"));
        if (rj.contains("do")) r.do_given = node_set(rj.at("do"));
        if (rj.contains("given")) r.obs_given = node_set(rj.at("given"));
        r.holds = true;
        if (rj.contains("holds")) {
            if (!rj.at("holds").is_boolean()) bad("holds must be a boolean");
            r.holds = rj.at("holds").get<bool>();
        }
        if (rj.contains("irreducible")) {
            const json& ir = rj.at("irreducible");
            if (ir.is_boolean()) r.irreducible = ir.get<bool>();
            else if (!(ir.is_string() && ir.get<std::string>() == "unknown") && !ir.is_null())
                bad("irreducible must be true, false or \"unknown\"");
        }
        if (r.source.empty() || r.target.empty()) bad("relation needs nonempty 'from' and 'to'");
        try {
            require_disjoint({&r.source, &r.target, &r.do_given, &r.obs_given});
        } catch (const Error& e) {
            bad(std::string("relation sets overlap: ") + e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string table_to_json(const AffectsTable& t) {
    json j;
    j["model"] = t.model;
    json rels = json::array();
    for (auto& r : t.relations) rels.push_back(relation_json(r));
    j["relations"] = rels;
    json ds = json::array();
    for (auto& [tr, v] : t.dseps) ds.push_back(triple_json(tr, "dseparated", v));
    j["dseps"] = ds;
    json cs = json::array();
    for (auto& [tr, v] : t.cis) cs.push_back(triple_json(tr, "independent", v));
    j["cis"] = cs;
    return j.dump(2) + "\n";
}

}  // namespace ccm

#include "ccm/error.hpp"
#include "ccm/spacetime.hpp"
#include "json_util.hpp"

namespace ccm {

using namespace jsonutil;

namespace {

json location_json(const Location& l) {
    if (!l.element.empty()) return json(l.element);
    json a = json::array();
    for (auto& c : l.point) a.push_back(rational_json(c));
    return a;
}

Location parse_location(const Poset& p, const json& j, const std::string& id) {
    Location l;
    if (p.kind() == Poset::Kind::Finite) {
        if (!j.is_string()) bad("location of '" + id + "' must be a poset element id");
        l.element = j.get<std::string>();
    } else {
        if (!j.is_array()) bad("location of '" + id + "' must be an array of coordinates [t, x, ...]");
        for (auto& c : j) l.point.push_back(rational(c));
        if (l.point.size() != static_cast<std::size_t>(p.spatial_dims() + 1))
            bad("location of '" + id + "' has " + std::to_string(l.point.size()) + " coordinates, expected " +
                std::to_string(p.spatial_dims() + 1));
    }
    return l;
}

}  // namespace

Embedding parse_embedding(const std::string& json_text) {
    json j = parse_text(json_text);
    const json& pj = field(j, "poset");
    std::string type = str(field(pj, "type"), "poset type");
    Embedding e;
    if (type == "minkowski") {
        int dim = integer(field(pj, "dim"), "dim");
        if (dim < 2) bad("Minkowski dimension must be at least 2");
        e.poset = Poset::minkowski(dim - 1);
    } else if (type == "finite") {
        std::vector<std::string> elements;
        for (auto& x : field(pj, "elements")) elements.push_back(str(x, "poset element"));
        std::vector<std::pair<std::string, std::string>> covers;
        if (pj.contains("covers"))
            for (auto& c : pj.at("covers")) {
                if (!c.is_array() || c.size() != 2) bad("each cover must be a pair [a, b]");
                covers.push_back({str(c[0], "cover element"), str(c[1], "cover element")});
            }
        e.poset = Poset::finite(elements, covers);
    } else {
        bad("unknown poset type '" + type + "'");
    }
    const json& locs = field(j, "locations");
    if (!locs.is_object()) bad("locations must be an object mapping ids to locations");
    for (auto& [id, lj] : locs.items()) e.locations[id] = parse_location(e.poset, lj, id);
    if (j.contains("accessible")) {
        const json& aj = j.at("accessible");
        if (aj.is_string()) {
            if (aj.get<std::string>() != "future") bad("accessible must be \"future\" or an object of regions");
        } else if (aj.is_object()) {
            e.accessible_future = false;
            for (auto& [id, rj] : aj.items()) {
                std::vector<std::string> region;
                for (auto& x : rj) region.push_back(str(x, "region element"));
                e.accessible[id] = region;
            }
        } else {
            bad("accessible must be \"future\" or an object of regions");
        }
    }
    e.validate();
    return e;
}

std::string embedding_to_json(const Embedding& e) {
    json j;
    json pj;
    if (e.poset.kind() == Poset::Kind::Minkowski) {
        pj["type"] = "minkowski";
        pj["dim"] = e.poset.spatial_dims() + 1;
    } else {
        pj["type"] = "finite";
        pj["elements"] = e.poset.elements();
        json covers = json::array();
        for (auto& [a, b] : e.poset.covers()) covers.push_back(json::array({a, b}));
        pj["covers"] = covers;
    }
    j["poset"] = pj;
    json locs = json::object();
    for (auto& [id, l] : e.locations) locs[id] = location_json(l);
    j["locations"] = locs;
    if (e.accessible_future) {
        j["accessible"] = "future";
    } else {
        json acc = json::object();
        for (auto& [id, r] : e.accessible) acc[id] = r;
        j["accessible"] = acc;
    }
    return j.dump(2) + "\n";
}

std::string compat_report_json(const CompatReport& r) {
    json j;
    j["compatible"] = r.compatible;
    j["mode"] = r.mode == CompatMode::Compat ? "compat" : "compat1_prime";
    json v = json::array();
    for (auto& c : r.violated) {
        json cj;
        cj["relation"] = relation_text(c.relation);
        cj["from"] = node_set_json(c.relation.source);
        cj["to"] = node_set_json(c.relation.target);
        cj["do"] = node_set_json(c.relation.do_given);
        cj["given"] = node_set_json(c.relation.obs_given);
        cj["witness"] = c.witness ? location_json(*c.witness) : json(nullptr);
        v.push_back(cj);
    }
    j["violated"] = v;
    return j.dump(2) + "\n";
}

}  // namespace ccm

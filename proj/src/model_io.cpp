#include "ccm/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace ccm {

using namespace jsonutil;

namespace {

std::vector<std::string> id_list(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array");
    std::vector<std::string> out;
    for (auto& x : j) out.push_back(str(x, what));
    return out;
}

ScalarMatrix scalar_matrix(const json& j) {
    if (!j.is_array()) bad("matrix must be an array of rows");
    ScalarMatrix m;
    for (auto& row : j) {
        if (!row.is_array()) bad("matrix row must be an array");
        std::vector<Scalar> r;
        for (auto& x : row) r.push_back(scalar(x));
        m.push_back(std::move(r));
    }
    return m;
}

json matrix_json(const ScalarMatrix& m) {
    json a = json::array();
    for (auto& row : m) {
        json r = json::array();
        for (auto& x : row) r.push_back(scalar_json(x));
        a.push_back(r);
    }
    return a;
}

Mechanism parse_mechanism(const json& j) {
    std::string kind = str(field(j, "kind"), "mechanism kind");
    if (kind == "table") {
        TableMechanism t;
        t.parents = id_list(field(j, "parents"), "parents");
        for (auto& r : field(j, "rows")) t.rows.push_back(integer(r, "table row"));
        return t;
    }
    if (kind == "expr") {
        ExprMechanism x;
        x.parents = id_list(field(j, "parents"), "parents");
        x.text = str(field(j, "expr"), "expr");
        x.root = parse_expr(x.text);
        return x;
    }
    if (kind == "measurement") {
        MeasurementMechanism q;
        q.quantum_parent = str(field(j, "quantum_parent"), "quantum_parent");
        for (auto& f : field(j, "factors")) q.factors.push_back(integer(f, "factor"));
        if (j.contains("setting_parents")) q.setting_parents = id_list(j.at("setting_parents"), "setting_parents");
        q.outcomes = integer(field(j, "outcomes"), "outcomes");
        for (auto& povm : field(j, "effects")) {
            std::vector<ScalarMatrix> v;
            for (auto& e : povm) v.push_back(scalar_matrix(e));
            q.effects.push_back(std::move(v));
        }
        return q;
    }
    bad("unknown mechanism kind " + kind);
}

json mechanism_json(const Mechanism& m) {
    json j;
    if (auto t = std::get_if<TableMechanism>(&m)) {
        j["kind"] = "table";
        j["parents"] = t->parents;
        j["rows"] = t->rows;
    } else if (auto x = std::get_if<ExprMechanism>(&m)) {
        j["kind"] = "expr";
        j["parents"] = x->parents;
        j["expr"] = x->text;
    } else {
        auto& q = std::get<MeasurementMechanism>(m);
        j["kind"] = "measurement";
        j["quantum_parent"] = q.quantum_parent;
        j["factors"] = q.factors;
        j["setting_parents"] = q.setting_parents;
        j["outcomes"] = q.outcomes;
        json effs = json::array();
        for (auto& povm : q.effects) {
            json p = json::array();
            for (auto& e : povm) p.push_back(matrix_json(e));
            effs.push_back(p);
        }
        j["effects"] = effs;
    }
    return j;
}

std::vector<Rational> prob_list(const json& j) {
    if (!j.is_array()) bad("distribution must be an array");
    std::vector<Rational> out;
    for (auto& x : j) out.push_back(rational(x));
    return out;
}

json prob_list_json(const std::vector<Rational>& v) {
    json a = json::array();
    for (auto& q : v) a.push_back(rational_json(q));
    return a;
}

Edge edge(const json& j) {
    if (!j.is_array() || j.size() != 2) bad("edge must be a 2-element array");
    return {str(j[0], "edge endpoint"), str(j[1], "edge endpoint")};
}

}  // namespace

CausalModel parse_model(const std::string& json_text) {
    json j = parse_text(json_text);
    if (!j.is_object()) bad("model must be a JSON object");
    CausalModel m;
    m.name = j.contains("name") ? str(j.at("name"), "name") : "";
    std::vector<Node> nodes;
    for (auto& n : field(j, "nodes")) {
        Node node;
        node.id = str(field(n, "name"), "node name");
        std::string vis = n.contains("visibility") ? str(n.at("visibility"), "visibility") : "observed";
        if (vis == "observed") node.visibility = Visibility::Observed;
        else if (vis == "latent") node.visibility = Visibility::Latent;
        else bad("visibility must be observed or latent");
        std::string sort = n.contains("sort") ? str(n.at("sort"), "sort") : "classical";
        if (sort == "classical") node.sort = Sort::Classical;
        else if (sort == "quantum") node.sort = Sort::Quantum;
        else bad("sort must be classical or quantum");
        if (node.sort == Sort::Classical) m.cards[node.id] = n.contains("card") ? integer(n.at("card"), "card") : 2;
        nodes.push_back(node);
    }
    std::vector<Edge> edges;
    if (j.contains("edges"))
        for (auto& e : j.at("edges")) edges.push_back(edge(e));
    m.graph = CausalGraph(nodes, edges);
    if (j.contains("mechanisms")) {
        if (!j.at("mechanisms").is_object()) bad("mechanisms must be an object");
        for (auto& [id, mj] : j.at("mechanisms").items()) m.mechanisms[id] = parse_mechanism(mj);
    }
    if (j.contains("exogenous")) {
        if (!j.at("exogenous").is_object()) bad("exogenous must be an object");
        for (auto& [id, ej] : j.at("exogenous").items()) {
            if (ej.contains("dist")) {
                m.exogenous[id] = ClassicalPrior{prob_list(ej.at("dist"))};
            } else if (ej.contains("state")) {
                const json& s = ej.at("state");
                QuantumPrior q;
                for (auto& d : field(s, "dims")) q.dims.push_back(integer(d, "dimension"));
                if (s.contains("amplitudes"))
                    for (auto& a : s.at("amplitudes")) q.amplitudes.push_back(scalar(a));
                else
                    q.rho = scalar_matrix(field(s, "rho"));
                m.exogenous[id] = q;
            } else {
                bad("exogenous entry for " + id + " needs 'dist' or 'state'");
            }
        }
    }
    std::string sem = j.contains("semantics") ? str(j.at("semantics"), "semantics") : "fixed_point";
    if (sem == "fixed_point") m.semantics = Semantics::FixedPoint;
    else if (sem == "post_select") m.semantics = Semantics::PostSelect;
    else bad("semantics must be fixed_point or post_select");
    if (j.contains("post_select")) {
        const json& ps = j.at("post_select");
        if (ps.contains("cut_edges"))
            for (auto& e : ps.at("cut_edges")) m.post_select.cut_edges.push_back(edge(e));
        if (ps.contains("star_prior")) {
            const json& sp = ps.at("star_prior");
            if (sp.is_string()) {
                if (sp.get<std::string>() != "uniform") bad("star_prior must be \"uniform\" or an object");
            } else if (sp.is_object()) {
                for (auto& [id, d] : sp.items()) m.post_select.star_prior[id] = prob_list(d);
            } else {
                bad("star_prior must be \"uniform\" or an object");
            }
        }
    }
    m.validate();
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CausalModel load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string model_to_json(const CausalModel& m) {
    json j;
    j["name"] = m.name;
    json nodes = json::array();
    for (auto& n : m.graph.nodes()) {
        json nj;
        nj["name"] = n.id;
        nj["visibility"] = n.visibility == Visibility::Observed ? "observed" : "latent";
        nj["sort"] = n.sort == Sort::Classical ? "classical" : "quantum";
        if (n.sort == Sort::Classical) nj["card"] = m.cards.at(n.id);
        nodes.push_back(nj);
    }
    j["nodes"] = nodes;
    json edges = json::array();
    for (auto& e : m.graph.edges()) edges.push_back(json::array({e.first, e.second}));
    j["edges"] = edges;
    json mech = json::object();
    for (auto& n : m.graph.nodes())
        if (m.mechanisms.count(n.id)) mech[n.id] = mechanism_json(m.mechanisms.at(n.id));
    j["mechanisms"] = mech;
    json exo = json::object();
    for (auto& n : m.graph.nodes()) {
        auto it = m.exogenous.find(n.id);
        if (it == m.exogenous.end()) continue;
        if (auto c = std::get_if<ClassicalPrior>(&it->second)) {
            exo[n.id] = json{{"dist", prob_list_json(c->probs)}};
        } else {
            auto& q = std::get<QuantumPrior>(it->second);
            json s;
            s["dims"] = q.dims;
            if (!q.amplitudes.empty()) {
                json a = json::array();
                for (auto& x : q.amplitudes) a.push_back(scalar_json(x));
                s["amplitudes"] = a;
            } else {
                s["rho"] = matrix_json(q.rho);
            }
            exo[n.id] = json{{"state", s}};
        }
    }
    j["exogenous"] = exo;
    j["semantics"] = m.semantics == Semantics::FixedPoint ? "fixed_point" : "post_select";
    if (m.semantics == Semantics::PostSelect) {
        json ps;
        json cuts = json::array();
        for (auto& e : m.post_select.cut_edges) cuts.push_back(json::array({e.first, e.second}));
        ps["cut_edges"] = cuts;
        if (m.post_select.star_prior.empty()) {
            ps["star_prior"] = "uniform";
        } else {
            json sp = json::object();
            for (auto& [id, d] : m.post_select.star_prior) sp[id] = prob_list_json(d);
            ps["star_prior"] = sp;
        }
        j["post_select"] = ps;
    }
    return j.dump(2) + "\n";
}

}  // namespace ccm

#include "ccm/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <sstream>

#include "ccm/affects.hpp"
#include "ccm/error.hpp"
#include "ccm/model_io.hpp"
#include "json_util.hpp"

#ifndef CCM_DEFAULT_CORPUS_DIR
#define CCM_DEFAULT_CORPUS_DIR "corpus"
#endif

namespace ccm {

using namespace jsonutil;

std::string corpus_dir() {
    if (const char* env = std::getenv("CCM_CORPUS_DIR"); env && *env) return env;
    return CCM_DEFAULT_CORPUS_DIR;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "bell_classical", "bell_quantum", "thermostat", "one_time_pad", "traitor",  "nontransitive",
        "eg3",            "hoaffects1",   "hoaffects2", "hoaffects3",   "jamming",  "eg2",
        "eg4",            "finetuned_collider", "acl4_model", "acl1_faithful", "funcloop", "q_bell_loop",
        "prbox_loop",     "acl1_set",     "acl2_set",   "acl3_set",     "acl4_set", "acl7_set",
        "acl9_set",       "acl11_set",    "acl4_embedding", "acl4_embedding_moved", "acl7_embedding", "ejam_embedding",
    };
    return names;
}

std::vector<std::string> builtin_models() {
    std::vector<std::string> out;
    for (auto& n : builtin_names())
        if (n.find("_set") == std::string::npos && n.find("embedding") == std::string::npos) out.push_back(n);
    return out;
}

CorpusEntry parse_entry(const std::string& name, const std::string& json_text, const std::string& dir) {
    json j = parse_text(json_text);
    if (!j.is_object()) bad("corpus entry must be a JSON object");
    CorpusEntry e;
    e.name = name;
    e.expected_json = j.contains("expected") ? j.at("expected").dump() : "{}";
    if (j.contains("relations")) {
        e.kind = EntryKind::AffectsSetEntry;
        e.set = AffectsSet::from_relations(parse_relations(json_text));
    } else if (j.contains("poset")) {
        e.kind = EntryKind::EmbeddingEntry;
        e.embedding = parse_embedding(json_text);
        if (j.contains("set")) {
            e.set_ref = str(j.at("set"), "set");
            e.set = load_entry(dir.empty() ? corpus_dir() : dir, e.set_ref).set;
        }
    } else {
        e.kind = EntryKind::Model;
        e.model = parse_model(json_text);
    }
    return e;
}

CorpusEntry load_entry(const std::string& dir, const std::string& name) {
    std::string path = dir + "/" + name + ".json";
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error&) {
        throw Error(ErrorKind::UnknownEntry, "no corpus entry '" + name + "' in " + dir);
    }
    CorpusEntry e = parse_entry(name, text, dir);
    e.path = path;
    return e;
}

CorpusEntry load_builtin(const std::string& name) {
    const auto& names = builtin_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw Error(ErrorKind::UnknownEntry, "unknown corpus entry '" + name + "'");
    return load_entry(corpus_dir(), name);
}

std::string entry_to_json(const CorpusEntry& e) {
    json j;
    switch (e.kind) {
        case EntryKind::Model:
            j = parse_text(model_to_json(*e.model));
            break;
        case EntryKind::AffectsSetEntry:
            j["name"] = e.name;
            j["relations"] = parse_text(relations_to_json(e.set->relations));
            break;
        case EntryKind::EmbeddingEntry: {
            j["name"] = e.name;
            if (!e.set_ref.empty()) j["set"] = e.set_ref;
            json body = parse_text(embedding_to_json(*e.embedding));
            for (auto& [k, v] : body.items()) j[k] = v;
            break;
        }
    }
    j["expected"] = parse_text(e.expected_json);
    return j.dump(2) + "\n";
}

// ---- verification -------------------------------------------------------------

namespace {

class Checker {
public:
    explicit Checker(const CorpusEntry& e) : e_(e) {}

    std::vector<std::string> run() {
        json ex;
        try {
            ex = parse_text(e_.expected_json);
        } catch (const Error& err) {
            fail(std::string("expected block: ") + err.what());
            return failures_;
        }
        if (!ex.is_object()) {
            fail("expected block must be an object");
            return failures_;
        }
        for (auto& [key, block] : ex.items()) {
            if (!provenance_ok(key, block)) continue;
            try {
                dispatch(key, block);
            } catch (const Error& err) {
                fail(key + ": " + kind_name(err.kind()) + ": " + err.what());
            } catch (const std::exception& err) {
                fail(key + ": " + err.what());
            }
        }
        return failures_;
    }

private:
    const CorpusEntry& e_;
    std::vector<std::string> failures_;
    std::optional<Analyzer> analyzer_;
    std::optional<JointDistribution> observed_;

    void fail(const std::string& msg) { failures_.push_back(e_.name + ": " + msg); }

    bool provenance_ok(const std::string& key, const json& block) {
        if (!block.is_object() || !block.contains("provenance") || !block.at("provenance").is_string()) {
            fail(key + ": golden block without provenance tag");
            return false;
        }
        std::string p = block.at("provenance").get<std::string>();
        for (const char* tag : {"[PAPER", "[TRIVIAL", "[DERIVED"})
            if (p.rfind(tag, 0) == 0) return true;
        fail(key + ": provenance must start with [PAPER, [TRIVIAL or [DERIVED, got '" + p + "'");
        return false;
    }

    const CausalModel& model() {
        if (!e_.model) throw Error(ErrorKind::InvalidInput, "golden requires a model entry");
        return *e_.model;
    }
    Analyzer& analyzer() {
        if (!analyzer_) analyzer_.emplace(model());
        return *analyzer_;
    }
    const JointDistribution& observed() {
        if (!observed_) observed_ = analyzer().observed();
        return *observed_;
    }
    const AffectsSet& set() {
        if (!e_.set) throw Error(ErrorKind::InvalidInput, "golden requires an affects set");
        return *e_.set;
    }
    const Embedding& embedding() {
        if (!e_.embedding) throw Error(ErrorKind::InvalidInput, "golden requires an embedding entry");
        return *e_.embedding;
    }

    static const json& entries(const json& block) {
        const json& es = field(block, "entries");
        if (!es.is_array()) bad("entries must be an array");
        return es;
    }
    static bool flag(const json& block, const char* key) {
        return block.contains(key) && block.at(key).is_boolean() && block.at(key).get<bool>();
    }
    static CITriple triple_of(const json& t) {
        return CITriple{node_set(field(t, "x")), node_set(field(t, "y")), node_set(t.contains("z") ? t.at("z") : json::array())};
    }
    static bool same_triple(const CITriple& a, const CITriple& b) {
        return a.z == b.z && ((a.x == b.x && a.y == b.y) || (a.x == b.y && a.y == b.x));
    }
    static AffectsRelation relation_of(const json& r) {
        auto rels = parse_relations(json::array({r}).dump());
        return rels.front();
    }

    void dispatch(const std::string& key, const json& b) {
        if (key == "observed") check_observed(b);
        else if (key == "dseps") check_triples(b, "separated", true);
        else if (key == "cis") check_triples(b, "independent", false);
        else if (key == "affects") check_affects(b);
        else if (key == "arrows") check_arrows(b);
        else if (key == "fine_tuned") check_fine_tuned(b);
        else if (key == "dsep_property") check_dsep_property_block(b);
        else if (key == "error") check_error(b);
        else if (key == "loops") check_loops(b);
        else if (key == "recursive") check_recursive(b);
        else if (key == "oracle") check_oracle(b);
        else if (key == "embed") check_embed(b);
        else if (key == "compat") check_compat_block(b);
        else if (key == "classify") check_classify(b);
        else if (key == "ejam") check_ejam(b);
        else fail("unknown golden key '" + key + "'");
    }

    void check_observed(const json& b) {
        const CausalModel& m = model();
        auto vars = m.observed_variables();
        std::map<Assignment, Rational> want;
        for (auto& s : entries_or(b, "support")) {
            Assignment a;
            for (auto& [k, v] : field(s, "values").items()) a[k] = integer(v, "value");
            want[a] = rational(field(s, "p"));
        }
        auto all = all_assignments(vars);
        if (b.contains("tolerance")) {
            double tol = b.at("tolerance").get<double>();
            std::vector<double> got = observed_distribution_numeric(m);
            double total = 0;
            for (std::size_t i = 0; i < all.size(); ++i) {
                total += got[i];
                double w = want.count(all[i]) ? want[all[i]].get_d() : 0.0;
                if (std::abs(got[i] - w) > tol) {
                    std::ostringstream os;
                    os << "observed probability at index " << i << " is " << got[i] << ", golden " << w;
                    fail(os.str());
                }
            }
            if (std::abs(total - 1.0) > tol) fail("observed distribution not normalized");
            return;
        }
        const JointDistribution& d = observed();
        for (auto& a : all) {
            Rational w = want.count(a) ? want[a] : Rational(0);
            Rational got = d.prob(a);
            if (got != w) {
                std::ostringstream os;
                os << "observed probability of {";
                for (auto& [k, v] : a) os << k << "=" << v << ",";
                os << "} is " << rational_text(got) << ", golden " << rational_text(w);
                fail(os.str());
            }
        }
    }

    static const json& entries_or(const json& b, const char* key) {
        const json& es = field(b, key);
        if (!es.is_array()) bad(std::string(key) + " must be an array");
        return es;
    }

    void check_triples(const json& b, const char* value_key, bool graphical) {
        const CausalModel& m = model();
        auto holds = [&](const CITriple& t) {
            return graphical ? d_separated(m.graph, t.x, t.y, t.z) : cond_independent(observed(), t.x, t.y, t.z);
        };
        std::vector<CITriple> positive;
        for (auto& t : entries(b)) {
            CITriple tr = triple_of(t);
            bool want = field(t, value_key).get<bool>();
            if (want) positive.push_back(tr);
            if (holds(tr) != want)
                fail(std::string(graphical ? "d-separation " : "independence ") + triple_text(tr) + " expected " +
                     (want ? "true" : "false"));
        }
        if (!flag(b, "complete")) return;
        for (auto& tr : disjoint_triples(m.graph.observed())) {
            bool listed = std::any_of(positive.begin(), positive.end(), [&](auto& p) { return same_triple(p, tr); });
            if (!listed && holds(tr))
                fail(std::string("unlisted ") + (graphical ? "d-separation " : "independence ") + triple_text(tr));
        }
    }

    void check_affects(const json& b) {
        Analyzer& a = analyzer();
        for (auto& rj : entries(b)) {
            AffectsRelation want = relation_of(rj);
            bool got = a.ho_affects(want.source, want.target, want.do_given, want.obs_given);
            if (got != want.holds) {
                fail(relation_text(want) + " expected, computed the opposite");
                continue;
            }
            if (want.irreducible &&
                a.is_irreducible(want.source, want.target, want.do_given, want.obs_given) != *want.irreducible)
                fail(relation_text(want) + " expected " + (*want.irreducible ? "irreducible" : "reducible"));
        }
        bool all_irr = flag(b, "all_irreducible"), none = flag(b, "none_hold"),
             multi_red = flag(b, "multi_source_reducible");
        if (!all_irr && !none && !multi_red) return;
        AffectsTable t = affects_table(a, 2);
        for (auto& r : t.relations) {
            if (!r.holds) continue;
            if (none) fail("unexpected relation: " + relation_text(r));
            if (all_irr && r.obs_given.empty() && !a.is_irreducible(r.source, r.target, r.do_given, r.obs_given))
                fail("expected irreducible: " + relation_text(r));
            if (multi_red && r.source.size() > 1 && r.do_given.empty() && r.obs_given.empty() &&
                a.is_irreducible(r.source, r.target))
                fail("expected reducible: " + relation_text(r));
        }
    }

    void check_arrows(const json& b) {
        auto arrows = classify_arrows(analyzer());
        for (auto& aj : entries(b)) {
            Edge edge{str(field(aj, "from"), "from"), str(field(aj, "to"), "to")};
            std::string want = str(field(aj, "arrow"), "arrow");
            auto it = arrows.find(edge);
            if (it == arrows.end()) {
                fail("no arrow " + edge.first + "->" + edge.second);
                continue;
            }
            std::string got = it->second == Arrow::Solid ? "solid" : "dashed";
            if (got != want) fail("arrow " + edge.first + "->" + edge.second + " is " + got + ", golden " + want);
        }
    }

    void check_fine_tuned(const json& b) {
        auto got = fine_tuned_independences(model().graph, observed());
        if (b.contains("nonempty") && b.at("nonempty").get<bool>() == got.empty())
            fail(std::string("fine-tuned independences expected ") + (got.empty() ? "nonempty" : "empty"));
        if (!b.contains("entries")) return;
        std::vector<CITriple> want;
        for (auto& t : entries(b)) want.push_back(triple_of(t));
        for (auto& g : got)
            if (std::none_of(want.begin(), want.end(), [&](auto& w) { return same_triple(w, g); }))
                fail("unexpected fine-tuned independence " + triple_text(g));
        for (auto& w : want)
            if (std::none_of(got.begin(), got.end(), [&](auto& g) { return same_triple(w, g); }))
                fail("missing fine-tuned independence " + triple_text(w));
    }

    void check_dsep_property_block(const json& b) {
        bool want = field(b, "holds").get<bool>();
        ModelReport r = check_dsep_property(model());
        if (r.passed() != want) fail(std::string("d-separation property expected to ") + (want ? "hold" : "fail"));
    }

    void check_error(const json& b) {
        std::string kind = str(field(b, "kind"), "kind");
        Assignment want;
        if (b.contains("assignment"))
            for (auto& [k, v] : b.at("assignment").items()) want[k] = integer(v, "value");
        try {
            observed_distribution(model());
        } catch (const Error& err) {
            if (kind_name(err.kind()) != kind) fail(std::string("raised ") + kind_name(err.kind()) + ", golden " + kind);
            for (auto& [k, v] : want) {
                auto it = err.assignment().find(k);
                if (it == err.assignment().end() || it->second != v)
                    fail("error assignment differs at " + k);
            }
            return;
        }
        fail("evaluation succeeded, golden expects " + kind);
    }

    void check_loops(const json& b) {
        for (auto& lj : entries(b)) {
            int type = integer(field(lj, "type"), "type");
            bool want = field(lj, "found").get<bool>();
            if (detect_acl(set(), type).has_value() != want)
                fail("Type " + std::to_string(type) + " loop expected " + (want ? "found" : "absent"));
        }
    }

    void check_recursive(const json& b) {
        for (auto& rj : entries(b)) {
            int depth = integer(field(rj, "depth"), "depth");
            auto w = detect_acl_recursive(set(), depth);
            const json& t = field(rj, "type");
            if (t.is_null()) {
                if (w) fail("depth " + std::to_string(depth) + ": unexpected Type " + std::to_string(w->type));
            } else if (!w || w->type != t.get<int>()) {
                fail("depth " + std::to_string(depth) + ": expected Type " + std::to_string(t.get<int>()));
            }
        }
    }

    void check_oracle(const json& b) {
        bool want = field(b, "cyclic").get<bool>();
        if (cyclicity_certificate(set()).cyclic != want)
            fail(std::string("cyclicity oracle expected ") + (want ? "Cyclic" : "Unknown"));
    }

    void check_embed(const json& b) {
        for (auto& ej : entries(b)) {
            std::string req = str(field(ej, "require"), "require");
            Requirement r = req == "nondegenerate" ? Requirement::Nondegenerate : Requirement::Nontrivial;
            if (req != "nondegenerate" && req != "nontrivial") bad("require must be nontrivial or nondegenerate");
            bool want = field(ej, "sat").get<bool>();
            auto res = find_embedding_1p1(set(), r);
            if (res.sat != want) fail(req + " embedding expected " + (want ? "to exist" : "to be impossible"));
            if (res.sat) {
                EmbeddingClass c = classify_embedding(set(), res.embedding);
                if (!check_compat(set(), res.embedding).compatible || c.trivial ||
                    (r == Requirement::Nondegenerate && c.degenerate))
                    fail(req + " embedding returned by the search does not meet its requirement");
            }
        }
    }

    void check_compat_block(const json& b) {
        std::string mode = b.contains("mode") ? str(b.at("mode"), "mode") : "compat";
        CompatReport r = check_compat(set(), embedding(), mode == "compat1_prime" ? CompatMode::Compat1Prime
                                                                                   : CompatMode::Compat);
        bool want = field(b, "compatible").get<bool>();
        if (r.compatible != want) fail(std::string("embedding expected ") + (want ? "compatible" : "incompatible"));
        if (b.contains("violated")) {
            std::vector<std::string> got, exp;
            for (auto& v : r.violated) got.push_back(relation_text(v.relation));
            for (auto& v : b.at("violated")) exp.push_back(str(v, "violated relation"));
            if (got != exp) fail("violated relations differ from golden");
        }
    }

    void check_classify(const json& b) {
        EmbeddingClass c = classify_embedding(set(), embedding());
        if (c.trivial != field(b, "trivial").get<bool>()) fail("triviality differs from golden");
        if (c.degenerate != field(b, "degenerate").get<bool>()) fail("degeneracy differs from golden");
    }

    void check_ejam(const json& b) {
        bool want = field(b, "holds").get<bool>();
        if (ejam_check(embedding()) != want) fail(std::string("jamming configuration expected ") + (want ? "" : "not ") + "to hold");
    }
};

}  // namespace

std::vector<std::string> verify_entry(const CorpusEntry& e) { return Checker(e).run(); }

ModelReport verify_all() { return verify_all(corpus_dir()); }

ModelReport verify_all(const std::string& dir) {
    std::vector<std::future<std::vector<std::string>>> jobs;
    for (auto& name : builtin_names())
        jobs.push_back(std::async(std::launch::async, [&dir, name] {
            try {
                return verify_entry(load_entry(dir, name));
            } catch (const Error& err) {
                return std::vector<std::string>{name + ": " + kind_name(err.kind()) + ": " + err.what()};
            }
        }));
    ModelReport report;
    for (auto& j : jobs)
        for (auto& msg : j.get()) report.violations.push_back({"corpus", {}, msg});
    return report;
}

}  // namespace ccm

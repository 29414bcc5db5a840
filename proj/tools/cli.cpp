#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "ccm/affects.hpp"
#include "ccm/corpus.hpp"
#include "ccm/error.hpp"
#include "ccm/loops.hpp"
#include "ccm/model_io.hpp"
#include "ccm/spacetime.hpp"

namespace ccm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string resolve_input(const std::string& path) {
    if (fs::exists(path)) return path;
    fs::path p(path);
    if (p.is_relative()) {
        fs::path dir(corpus_dir());
        for (const fs::path& c : {dir / p, dir / p.filename(), dir / (path + ".json")})
            if (fs::exists(c)) return c.string();
    }
    throw Error(ErrorKind::InvalidInput, "cannot read '" + path + "'");
}

namespace {

// Comma lists name nodes explicitly; a bare token is a node name when the graph has one,
// otherwise a run of single-character names ("AC").
NodeSet parse_set(const std::string& text, const CausalGraph* g = nullptr) {
    NodeSet s;
    if (text.empty()) return s;
    if (g && g->has_node(text)) return {text};
    if (text.find(',') != std::string::npos) {
        std::stringstream ss(text);
        for (std::string id; std::getline(ss, id, ',');)
            if (!id.empty()) s.insert(id);
    } else {
        for (char c : text) s.insert(std::string(1, c));
    }
    return s;
}

json set_json(const NodeSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

std::string dist_text(const JointDistribution& d) {
    std::ostringstream os;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.weights()[i] == 0) continue;
        auto v = d.decode(i);
        os << "  ";
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? " " : "") << d.variables()[k].id << "=" << v[k];
        os << "  " << rational_text(d.weights()[i]) << "\n";
    }
    return os.str();
}

json dist_json(const JointDistribution& d) {
    json a = json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.weights()[i] == 0) continue;
        auto v = d.decode(i);
        json values = json::object();
        for (std::size_t k = 0; k < v.size(); ++k) values[d.variables()[k].id] = v[k];
        a.push_back({{"values", values}, {"p", rational_text(d.weights()[i])}});
    }
    return a;
}

struct Options {
    std::string input, format = "text", mode = "compat", require = "nontrivial", set_path, eps = "1/100", dir;
    std::string x, y, z, w;
    int max_set = 2, depth = kDefaultLoopDepth, trials = 1000;
    std::uint64_t seed = 12345;
};

void check_format(const Options& o, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed)
        if (o.format == f) return;
    throw Error(ErrorKind::InvalidInput, "unsupported --format '" + o.format + "' for this command");
}

// Embedding files may name their affects set; --set overrides.
AffectsSet set_for_embedding(const Options& o, const std::string& emb_path) {
    std::string ref = o.set_path;
    if (ref.empty()) {
        json j = json::parse(read_file(emb_path), nullptr, false);
        if (j.is_object() && j.contains("set") && j.at("set").is_string()) {
            ref = j.at("set").get<std::string>();
            fs::path sibling = fs::path(emb_path).parent_path() / (ref + ".json");
            if (fs::exists(sibling)) ref = sibling.string();
        }
    }
    if (ref.empty()) throw Error(ErrorKind::InvalidInput, "embedding names no affects set; pass --set");
    return AffectsSet::from_relations(parse_relations(read_file(resolve_input(ref))));
}

// A loops input is either an affects set or a model whose affects table is computed first.
AffectsSet set_for_loops(const Options& o, const std::string& path) {
    std::string text = read_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_array() || (j.is_object() && j.contains("relations")))
        return AffectsSet::from_relations(parse_relations(text));
    return AffectsSet::from_table(affects_table(parse_model(text), o.max_set));
}

int cmd_analyze(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json"});
    CausalModel m = load_model(resolve_input(o.input));
    Analyzer a(m);
    const JointDistribution& obs = a.observed();
    ModelReport dsep = check_dsep_property(m.graph, obs);
    auto fine = fine_tuned_independences(m.graph, obs);
    auto arrows = classify_arrows(a);
    if (o.format == "json") {
        json j;
        j["model"] = m.name;
        j["observed"] = dist_json(obs);
        json v = json::array();
        for (auto& x : dsep.violations) v.push_back(triple_text(x.sets));
        j["dsep_violations"] = v;
        json f = json::array();
        for (auto& t : fine) f.push_back(triple_text(t));
        j["fine_tuned"] = f;
        json ar = json::array();
        for (auto& [e, k] : arrows)
            ar.push_back({{"from", e.first}, {"to", e.second}, {"arrow", k == Arrow::Solid ? "solid" : "dashed"}});
        j["arrows"] = ar;
        j["cyclic"] = !m.graph.is_acyclic();
        out << j.dump(2) << "\n";
    } else {
        out << "model: " << m.name << (m.graph.is_acyclic() ? " (acyclic)" : " (cyclic)") << "\n";
        out << "observed distribution:\n" << dist_text(obs);
        out << "d-separation property: " << (dsep.passed() ? "holds" : "VIOLATED") << "\n";
        for (auto& x : dsep.violations) out << "  violated: " << triple_text(x.sets) << "\n";
        out << "fine-tuned independences:" << (fine.empty() ? " none" : "") << "\n";
        for (auto& t : fine) out << "  " << triple_text(t) << "\n";
        out << "arrows among observed nodes:\n";
        for (auto& [e, k] : arrows)
            out << "  " << e.first << (k == Arrow::Solid ? " --> " : " - -> ") << e.second << "\n";
    }
    return dsep.passed() ? kOk : kViolation;
}

int cmd_dsep(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json"});
    CausalModel m = load_model(resolve_input(o.input));
    std::vector<std::pair<CITriple, bool>> rows;
    if (!o.x.empty() || !o.y.empty()) {
        if (o.x.empty() || o.y.empty()) throw Error(ErrorKind::InvalidInput, "dsep needs both --x and --y");
        CITriple t{parse_set(o.x, &m.graph), parse_set(o.y, &m.graph), parse_set(o.z, &m.graph)};
        rows.push_back({t, d_separated(m.graph, t.x, t.y, t.z)});
    } else {
        for (auto& t : disjoint_triples(m.graph.observed())) rows.push_back({t, d_separated(m.graph, t.x, t.y, t.z)});
    }
    if (o.format == "json") {
        json a = json::array();
        for (auto& [t, v] : rows) a.push_back({{"x", set_json(t.x)}, {"y", set_json(t.y)}, {"z", set_json(t.z)}, {"dseparated", v}});
        out << a.dump(2) << "\n";
    } else {
        for (auto& [t, v] : rows) out << triple_text(t, v ? "_|_" : "not _|_") << "\n";
    }
    return kOk;
}

int cmd_affects(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json"});
    if (o.x.empty() || o.y.empty()) throw Error(ErrorKind::InvalidInput, "affects needs --from and --to");
    Analyzer a(load_model(resolve_input(o.input)));
    const CausalGraph* g = &a.model().graph;
    AffectsRelation r = a.decide(parse_set(o.x, g), parse_set(o.y, g), parse_set(o.z, g), parse_set(o.w, g));
    if (o.format == "json") out << relations_to_json({r});
    else {
        out << relation_text(r);
        if (r.holds && r.irreducible) out << (*r.irreducible ? " (irreducible)" : " (reducible)");
        out << "\n";
    }
    return kOk;
}

int cmd_table(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json"});
    AffectsTable t = affects_table(load_model(resolve_input(o.input)), o.max_set);
    out << (o.format == "json" ? table_to_json(t) : render_table_text(t));
    return kOk;
}

int cmd_loops(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json"});
    AffectsSet a = set_for_loops(o, resolve_input(o.input));
    std::vector<LoopWitness> found;
    for (int t = 1; t <= 8; ++t)
        if (auto w = detect_acl(a, t)) found.push_back(*w);
    auto deep = detect_acl_recursive(a, o.depth);
    if (deep && deep->type >= 9) found.push_back(*deep);
    CyclicityResult c = cyclicity_certificate(a);
    if (o.format == "json") {
        json j;
        json ws = json::array();
        for (auto& w : found) ws.push_back(json::parse(witness_to_json(w)));
        j["witnesses"] = ws;
        j["oracle"] = c.cyclic ? "cyclic" : "unknown";
        j["explanation"] = c.explanation;
        out << j.dump(2) << "\n";
    } else {
        if (found.empty()) out << "no Type 1-10 witness (recursion depth " << o.depth << ")\n";
        for (auto& w : found) out << "Type " << w.type << " witness: " << witness_text(w) << "\n";
        out << "cause-constraint oracle: " << (c.cyclic ? "Cyclic" : "Unknown") << "\n";
        if (!c.explanation.empty()) out << "  " << c.explanation << "\n";
    }
    return kOk;
}

CompatMode parse_mode(const std::string& m) {
    if (m == "compat") return CompatMode::Compat;
    if (m == "compat1_prime") return CompatMode::Compat1Prime;
    throw Error(ErrorKind::InvalidInput, "--mode must be compat or compat1_prime");
}

int cmd_embed_check(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json", "svg"});
    std::string path = resolve_input(o.input);
    Embedding e = parse_embedding(read_file(path));
    AffectsSet a = set_for_embedding(o, path);
    CompatReport r = check_compat(a, e, parse_mode(o.mode));
    if (o.format == "json") {
        out << compat_report_json(r);
    } else if (o.format == "svg") {
        out << render_svg(e);
    } else {
        EmbeddingClass k = classify_embedding(a, e);
        out << (r.compatible ? "compatible" : "INCOMPATIBLE") << " (" << o.mode << ")";
        out << (k.trivial ? ", trivial" : ", non-trivial") << (k.degenerate ? ", degenerate" : ", non-degenerate")
            << "\n";
        for (auto& v : r.violated) {
            out << "  violated: " << relation_text(v.relation);
            if (v.witness) out << "  witness " << location_text(*v.witness);
            out << "\n";
        }
        out << render_ascii(e);
    }
    return r.compatible ? kOk : kViolation;
}

int cmd_embed_find(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json", "svg"});
    AffectsSet a = AffectsSet::from_relations(parse_relations(read_file(resolve_input(o.input))));
    Requirement req;
    if (o.require == "nontrivial") req = Requirement::Nontrivial;
    else if (o.require == "nondegenerate") req = Requirement::Nondegenerate;
    else throw Error(ErrorKind::InvalidInput, "--require must be nontrivial or nondegenerate");
    EmbedSearchResult r = find_embedding_1p1(a, req);
    if (!r.sat) {
        if (o.format == "json") {
            json j;
            j["sat"] = false;
            j["reason"] = r.reason;
            json b = json::array();
            for (auto& rel : r.blocking) b.push_back(relation_text(rel));
            j["blocking"] = b;
            out << j.dump(2) << "\n";
        } else {
            out << "Unsat: " << r.reason << "\n";
            for (auto& rel : r.blocking) out << "  blocking: " << relation_text(rel) << "\n";
        }
        return kViolation;
    }
    if (o.format == "json") out << embedding_to_json(r.embedding);
    else if (o.format == "svg") out << render_svg(r.embedding);
    else out << "Sat: " << o.require << " embedding in M(1+1)\n" << render_ascii(r.embedding);
    return kOk;
}

int cmd_stability(const Options& o, std::ostream& out) {
    check_format(o, {"text", "json"});
    std::string path = resolve_input(o.input);
    Embedding e = parse_embedding(read_file(path));
    AffectsSet a = set_for_embedding(o, path);
    Rational eps = parse_rational(o.eps);
    double frac = stability_probe(a, e, eps, o.trials, o.seed);
    long hits = std::lround(frac * o.trials);
    if (o.format == "json") {
        out << json{{"eps", rational_text(eps)}, {"trials", o.trials}, {"seed", o.seed}, {"compatible", hits},
                    {"fraction", frac}}.dump(2)
            << "\n";
    } else {
        out << hits << " of " << o.trials << " perturbed embeddings compatible (eps " << rational_text(eps)
            << ", seed " << o.seed << ")\n";
    }
    return kOk;
}

int cmd_corpus_verify(const Options& o, std::ostream& out) {
    check_format(o, {"text"});
    ModelReport r = o.dir.empty() ? verify_all() : verify_all(o.dir);
    for (auto& v : r.violations) out << "FAIL " << v.detail << "\n";
    out << (r.passed() ? "corpus verified: " : "corpus verification failed: ") << builtin_names().size()
        << " entries, " << r.violations.size() << " failures\n";
    return r.passed() ? kOk : kViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cyclic and fine-tuned causal models: affects relations, loops and space-time embeddings", "ccm"};
    app.require_subcommand(1);
    Options o;

    auto input = [&](CLI::App* c, const char* what) { c->add_option("input", o.input, what)->required(); };
    auto format = [&](CLI::App* c, const char* choices = "text or json") { c->add_option("--format", o.format, choices); };

    auto* analyze = app.add_subcommand("analyze", "observed distribution, d-separation property, arrows");
    input(analyze, "model file");
    format(analyze);

    auto* dsep = app.add_subcommand("dsep", "d-separation queries (all observed triples by default)");
    input(dsep, "model file");
    dsep->add_option("--x", o.x, "first set, e.g. AB or A1,A2");
    dsep->add_option("--y", o.y, "second set");
    dsep->add_option("--z", o.z, "conditioning set");
    format(dsep);

    auto* affects = app.add_subcommand("affects", "decide one (higher-order, conditional) affects relation");
    input(affects, "model file");
    affects->add_option("--from", o.x, "intervened set")->required();
    affects->add_option("--to", o.y, "affected set")->required();
    affects->add_option("--do", o.z, "additionally intervened set");
    affects->add_option("--given", o.w, "observed conditioning set");
    format(affects);

    auto* table = app.add_subcommand("table", "table of d-separations, independences and affects relations");
    input(table, "model file");
    table->add_option("--max-set", o.max_set, "largest set size")->check(CLI::Range(1, 4));
    format(table);

    auto* loops = app.add_subcommand("loops", "affects causal loop detection");
    input(loops, "affects-set or model file");
    loops->add_option("--depth", o.depth, "recursion depth for Types 9/10")->check(CLI::Range(1, 8));
    loops->add_option("--max-set", o.max_set, "largest set size when the input is a model")->check(CLI::Range(1, 4));
    format(loops);

    auto* check = app.add_subcommand("embed-check", "check compatibility of an embedding");
    input(check, "embedding file");
    check->add_option("--set", o.set_path, "affects-set file (default: the set named in the embedding)");
    check->add_option("--mode", o.mode, "compat or compat1_prime");
    format(check, "text, json or svg");

    auto* find = app.add_subcommand("embed-find", "search for a compatible embedding in M(1+1)");
    input(find, "affects-set file");
    find->add_option("--require", o.require, "nontrivial or nondegenerate");
    format(find, "text, json or svg");

    auto* stab = app.add_subcommand("stability", "perturb an embedding and count compatible trials");
    input(stab, "embedding file");
    stab->add_option("--set", o.set_path, "affects-set file");
    stab->add_option("--eps", o.eps, "perturbation size, e.g. 1/100");
    stab->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
    stab->add_option("--seed", o.seed, "random seed");
    format(stab);

    auto* verify = app.add_subcommand("corpus-verify", "recompute every golden result of the corpus");
    verify->add_option("--dir", o.dir, "corpus directory (default: $CCM_CORPUS_DIR or the built-in one)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (*analyze) return cmd_analyze(o, out);
        if (*dsep) return cmd_dsep(o, out);
        if (*affects) return cmd_affects(o, out);
        if (*table) return cmd_table(o, out);
        if (*loops) return cmd_loops(o, out);
        if (*check) return cmd_embed_check(o, out);
        if (*find) return cmd_embed_find(o, out);
        if (*stab) return cmd_stability(o, out);
        if (*verify) return cmd_corpus_verify(o, out);
    } catch (const std::exception& e) {  // ccm::Error messages start with the error kind
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace ccm::cli

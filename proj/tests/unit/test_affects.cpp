#include <doctest.h>

#include "ccm/affects.hpp"
#include "ccm/error.hpp"
#include "ccm/model_io.hpp"
#include "support.hpp"

using namespace ccm;
using testing::S;

namespace {

using OracleJoint = std::map<std::vector<int>, Rational>;

// P(target | evidence) from an oracle joint, keyed by target values; empty when the evidence has zero mass.
std::map<std::vector<int>, Rational> oracle_conditional(const OracleJoint& j, const std::vector<int>& target,
                                                        const std::map<int, int>& evidence) {
    std::map<std::vector<int>, Rational> out;
    Rational total = 0;
    for (auto& [v, w] : j) {
        bool ok = true;
        for (auto& [i, val] : evidence) ok &= v[i] == val;
        if (!ok || w == 0) continue;
        std::vector<int> k;
        for (int i : target) k.push_back(v[i]);
        out[k] += w;
        total += w;
    }
    if (total == 0) return {};
    for (auto& [k, w] : out) w /= total;
    return out;
}

std::vector<std::map<int, int>> oracle_assignments(const testing::TableModel& tm, const std::vector<int>& ids) {
    std::vector<std::map<int, int>> out{{}};
    for (int i : ids) {
        std::vector<std::map<int, int>> next;
        for (auto& a : out)
            for (int v = 0; v < tm.card[i]; ++v) {
                auto b = a;
                b[i] = v;
                next.push_back(b);
            }
        out = next;
    }
    return out;
}

// Direct reading of the definition: some x, z, w with both conditionals defined and different.
bool oracle_affects(const testing::TableModel& tm, const std::vector<int>& x, const std::vector<int>& y,
                    const std::vector<int>& z, const std::vector<int>& w) {
    for (auto& za : oracle_assignments(tm, z)) {
        OracleJoint do_z = tm.joint(za);
        for (auto& xa : oracle_assignments(tm, x)) {
            std::map<int, int> xz = za;
            xz.insert(xa.begin(), xa.end());
            OracleJoint do_xz = tm.joint(xz);
            for (auto& wa : oracle_assignments(tm, w)) {
                std::map<int, int> ev_l = xz, ev_r = za;
                ev_l.insert(wa.begin(), wa.end());
                ev_r.insert(wa.begin(), wa.end());
                auto l = oracle_conditional(do_xz, y, ev_l), r = oracle_conditional(do_z, y, ev_r);
                if (!l.empty() && !r.empty() && l != r) return true;
            }
        }
    }
    return false;
}

std::vector<int> indices(const NodeSet& s) {
    std::vector<int> out;
    for (auto& id : s) out.push_back(id[0] - 'A');
    return out;
}

NodeSet observed_of(const testing::TableModel& tm) {
    NodeSet s;
    for (int i = 0; i < tm.g.n; ++i)
        if (!tm.latent[i]) s.insert(testing::node_name(i));
    return s;
}

}  // namespace

TEST_CASE("higher-order affects agrees with a direct evaluation of the definition") {
    std::mt19937_64 rng(31);
    int holds = 0, total = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto tm = testing::random_table_model(rng, 4, 0.5);
        Analyzer a(parse_model(tm.json_text()));
        for (auto& q : affects_quads(observed_of(tm), 2)) {
            bool expect = oracle_affects(tm, indices(q.x), indices(q.y), indices(q.z), indices(q.w));
            CAPTURE(trial);
            CAPTURE(set_name(q.x) + " -> " + set_name(q.y) + " do " + set_name(q.z) + " given " + set_name(q.w));
            CHECK(a.ho_affects(q.x, q.y, q.z, q.w) == expect);
            holds += expect;
            ++total;
        }
    }
    CHECK(holds > 20);
    CHECK(total - holds > 20);
}

TEST_CASE("jamming: B affects AC but neither A nor C") {
    Analyzer a(testing::corpus_model("jamming"));
    CHECK_FALSE(a.ho_affects(S("B"), S("A")));
    CHECK_FALSE(a.ho_affects(S("B"), S("C")));
    CHECK(a.ho_affects(S("B"), S("AC")));
    CHECK_FALSE(a.ho_affects(S("AC"), S("B")));
}

TEST_CASE("affects is not transitive") {
    Analyzer a(testing::corpus_model("nontransitive"));
    CHECK(a.ho_affects(S("X"), S("Y")));
    CHECK_FALSE(a.ho_affects(S("X"), S("Z")));
    CHECK(a.ho_affects(S("Y"), S("Z")));
}

TEST_CASE("higher-order affects without joint affects") {
    Analyzer a(testing::corpus_model("hoaffects3"));
    CHECK(a.ho_affects(S("X"), S("Y"), S("Z")));
    CHECK_FALSE(a.ho_affects(S("XZ"), S("Y")));
    CHECK(a.ho_affects(S("Z"), S("Y")));
}

TEST_CASE("reducibility of joint relations") {
    Analyzer reducible(testing::corpus_model("hoaffects1"));
    REQUIRE(reducible.ho_affects(S("XZ"), S("Y")));
    CHECK(reducible.is_reducible(reducible.decide(S("XZ"), S("Y"))));

    Analyzer irreducible(testing::corpus_model("hoaffects2"));
    REQUIRE(irreducible.ho_affects(S("XZ"), S("Y")));
    CHECK_FALSE(irreducible.is_reducible(irreducible.decide(S("XZ"), S("Y"))));

    AffectsRelation single = irreducible.decide(S("Z"), S("Y"));
    if (single.holds) CHECK_FALSE(irreducible.is_reducible(single));

    AffectsRelation none = reducible.decide(S("Y"), S("X"));
    REQUIRE_FALSE(none.holds);
    bool threw = false;
    try {
        reducible.is_reducible(none);
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::NotAnAffectsRelation;
    }
    CHECK(threw);
}

TEST_CASE("two-source relations in the faithful four-cycle are irreducible") {
    // Each source element affects BD once the other is held fixed, so the joint relation does not reduce.
    Analyzer a(testing::corpus_model("acl1_faithful"));
    for (auto [x, y] : {std::pair{"AC", "BD"}, std::pair{"BD", "AC"}}) {
        AffectsRelation r = a.decide(S(x), S(y));
        CAPTURE(relation_text(r));
        REQUIRE(r.holds);
        CHECK(r.irreducible == std::optional<bool>(true));
        for (auto& e : S(x)) CHECK(a.ho_affects({e}, S(y), set_minus(S(x), {e})));
    }
}

TEST_CASE("solid and dashed arrows") {
    auto eg4 = classify_arrows(testing::corpus_model("eg4"));
    CHECK(eg4.at({"X", "W"}) == Arrow::Solid);
    CHECK(eg4.at({"X", "Y"}) == Arrow::Dashed);
    CHECK(eg4.at({"W", "Y"}) == Arrow::Dashed);
    CHECK(eg4.at({"Z", "X"}) == Arrow::Solid);
    CHECK(eg4.at({"Z", "W"}) == Arrow::Dashed);

    auto eg3 = classify_arrows(testing::corpus_model("eg3"));
    CHECK(eg3.at({"E", "H"}) == Arrow::Solid);
    CHECK(eg3.at({"S", "H"}) == Arrow::Dashed);

    auto chain = parse_model(R"json({"name": "chain", "nodes": [{"name": "X"}, {"name": "Y"}], "edges": [["X", "Y"]],
        "mechanisms": {"Y": {"kind": "expr", "parents": ["X"], "expr": "copy(X)"}},
        "exogenous": {"X": {"dist": ["1/2", "1/2"]}}})json");
    CHECK(classify_arrows(chain).at({"X", "Y"}) == Arrow::Solid);
}

TEST_CASE("do-calculus instances") {
    auto bell = testing::corpus_model("bell_classical");
    auto r = do_calculus_verify(bell, 2, {}, S("X"), S("A"), {});
    CHECK(r.antecedent);
    CHECK(r.equality == std::optional<bool>(true));

    auto jam = do_calculus_verify(testing::corpus_model("jamming"), 3, {}, S("B"), S("A"), {});
    CHECK(jam.antecedent);
    CHECK(jam.equality == std::optional<bool>(true));

    auto col = do_calculus_verify(testing::corpus_model("finetuned_collider"), 1, {}, S("A"), S("C"), S("B"));
    CHECK_FALSE(col.antecedent);
    CHECK_FALSE(col.equality.has_value());
}

TEST_CASE("do-calculus holds on random acyclic models") {
    std::mt19937_64 rng(41);
    int antecedents = 0;
    for (int trial = 0; trial < 15; ++trial) {
        auto tm = testing::random_table_model(rng, 4, 0.45);
        Analyzer a(parse_model(tm.json_text()));
        for (auto& q : affects_quads(observed_of(tm), 2)) {
            if (q.z.empty()) continue;
            // the quads name (source, target, do, given); use them as (X, Y, Z, W) of the rules
            for (int rule = 1; rule <= 3; ++rule) {
                auto r = do_calculus_verify(a, rule, q.x, q.y, q.z, q.w);
                if (!r.antecedent) continue;
                ++antecedents;
                CHECK(r.equality == std::optional<bool>(true));
            }
        }
    }
    CHECK(antecedents > 50);
}

TEST_CASE("graphical non-affects certificates") {
    auto jam = testing::corpus_model("jamming").graph;
    CHECK(graphical_nonaffects(jam, S("A"), S("C")) == NonAffectsProof::SourceSeparated);
    auto acl4 = testing::corpus_model("acl4_model").graph;
    CHECK(graphical_nonaffects(acl4, S("B"), S("A")) == NonAffectsProof::SourceSeparated);
    std::vector<Node> nodes{{"X"}, {"Y"}};
    CHECK_FALSE(graphical_nonaffects(CausalGraph(nodes, {{"X", "Y"}}), S("X"), S("Y")).has_value());
}

TEST_CASE("graphical non-affects certificates are sound") {
    std::mt19937_64 rng(43);
    int certified = 0;
    auto check_model = [&](const CausalModel& m) {
        Analyzer a(m);
        for (auto& q : affects_quads(m.graph.observed(), 2)) {
            if (!graphical_nonaffects(m.graph, q.x, q.y, q.z, q.w)) continue;
            ++certified;
            CAPTURE(m.name);
            CAPTURE(set_name(q.x) + " -> " + set_name(q.y) + " do " + set_name(q.z) + " given " + set_name(q.w));
            CHECK_FALSE(a.ho_affects(q.x, q.y, q.z, q.w));
        }
    };
    for (auto& name : {"jamming", "finetuned_collider", "eg3", "eg4", "hoaffects1", "hoaffects2", "hoaffects3",
                       "nontransitive", "bell_classical"})
        check_model(testing::corpus_model(name));
    for (int trial = 0; trial < 15; ++trial) check_model(parse_model(testing::random_table_model(rng, 4, 0.45).json_text()));
    CHECK(certified > 100);
}

TEST_CASE("structural properties of higher-order affects on random models") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 12; ++trial) {
        auto tm = testing::random_table_model(rng, 4, 0.5);
        Analyzer a(parse_model(tm.json_text()));
        for (auto& q : affects_quads(observed_of(tm), 2)) {
            CAPTURE(trial);
            CAPTURE(set_name(q.x) + " -> " + set_name(q.y) + " do " + set_name(q.z) + " given " + set_name(q.w));
            bool h = a.ho_affects(q.x, q.y, q.z, q.w);
            // a higher-order relation implies the do-set or the joint set affects the target
            if (h && !q.z.empty())
                CHECK((a.ho_affects(q.z, q.y, {}, q.w) || a.ho_affects(set_union(q.x, q.z), q.y, {}, q.w)));
            // observing W instead of including it in the target
            if (!q.w.empty())
                CHECK(a.ho_affects(q.x, set_union(q.y, q.w), q.z) ==
                      (h || a.ho_affects(q.x, q.w, q.z)));
            // a reducible relation has a proper subset that affects the target on its own
            if (h && q.x.size() > 1 && a.is_reducible(a.decide(q.x, q.y, q.z, q.w))) {
                bool some = false;
                for (auto& e : q.x) some |= a.ho_affects({e}, q.y, q.z, q.w);
                CHECK(some);
            }
        }
    }
}

TEST_CASE("affects relations round-trip through JSON") {
    AffectsTable t = affects_table(testing::corpus_model("jamming"), 2);
    auto back = parse_relations(relations_to_json(t.relations));
    REQUIRE(back.size() == t.relations.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == t.relations[i]);
    auto from_table = parse_relations(table_to_json(t));
    CHECK(from_table.size() == t.relations.size());
    CHECK_THROWS_AS(parse_relations("[{\"from\": 1}]"), Error);
}

TEST_CASE("relation text") {
    AffectsRelation r{S("B"), S("AC"), {}, {}, true, true};
    CHECK(relation_text(r) == "B affects AC");
    AffectsRelation c{S("X"), S("Y"), S("Z"), S("W"), false, std::nullopt};
    CHECK(relation_text(c).find("does not affect") != std::string::npos);
}

TEST_CASE("overlapping sets are rejected") {
    Analyzer a(testing::corpus_model("jamming"));
    bool threw = false;
    try {
        a.ho_affects(S("A"), S("AB"));
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::OverlappingSets;
    }
    CHECK(threw);
}

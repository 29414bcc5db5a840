#include <doctest.h>

#include "ccm/error.hpp"
#include "ccm/model_io.hpp"
#include "ccm/spacetime.hpp"
#include "support.hpp"

using namespace ccm;
using testing::S;

namespace {

Embedding corpus_embedding(const std::string& name) { return *ccm::load_entry(CCM_TEST_CORPUS_DIR, name).embedding; }

// (1+1) causal order in light-cone coordinates u = t + x, v = t - x.
bool lc_precedes(const Point& a, const Point& b) { return b[0] + b[1] >= a[0] + a[1] && b[0] - b[1] >= a[0] - a[1]; }

Point random_point(std::mt19937_64& rng, int range) {
    auto c = [&] { return Rational(static_cast<int>(rng() % (2 * range + 1)) - range, 2); };
    return {c(), c()};
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("Minkowski order is the light-cone order") {
    Poset p = Poset::minkowski(1);
    std::mt19937_64 rng(61);
    for (int i = 0; i < 500; ++i) {
        Point a = random_point(rng, 6), b = random_point(rng, 6);
        CHECK(p.precedes({"", a}, {"", b}) == lc_precedes(a, b));
    }
    Poset p3 = Poset::minkowski(3);
    CHECK(p3.precedes(point({0, 0, 0, 0}), point({1, Rational(1, 2), Rational(1, 2), Rational(1, 2)})));
    CHECK_FALSE(p3.precedes(point({0, 0, 0, 0}), point({1, 1, 1, 0})));
}

TEST_CASE("finite posets") {
    Poset p = Poset::finite({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
    CHECK(p.precedes(element("a"), element("d")));
    CHECK(p.precedes(element("b"), element("b")));
    CHECK_FALSE(p.precedes(element("b"), element("c")));
    CHECK(kind_of([&] { p.precedes(element("a"), element("q")); }) == ErrorKind::UnknownElement);
    auto r = future_contained(p, {element("b"), element("c")}, {element("a")});
    CHECK(r.status == Containment::Contained);
    auto n = future_contained(p, {element("a")}, {element("b")});
    CHECK(n.status == Containment::NotContained);
    REQUIRE(n.witness);
    CHECK_FALSE(p.precedes(element("b"), *n.witness));
}

TEST_CASE("joint futures in (1+1) dimensions") {
    Poset p = Poset::minkowski(1);
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Location> a{{"", random_point(rng, 4)}, {"", random_point(rng, 4)}};
        std::vector<Location> b{{"", random_point(rng, 4)}};
        if (trial % 2) b.push_back({"", random_point(rng, 4)});
        // the joint future of a is the future of its light-cone join (max u, max v)
        Rational u = std::max(a[0].point[0] + a[0].point[1], a[1].point[0] + a[1].point[1]);
        Rational v = std::max(a[0].point[0] - a[0].point[1], a[1].point[0] - a[1].point[1]);
        Point join{(u + v) / 2, (u - v) / 2};
        CHECK(join_1p1(a).point == join);
        bool expect = true;
        for (auto& l : b) expect &= lc_precedes(l.point, join);
        auto r = future_contained(p, a, b);
        CHECK(r.status == (expect ? Containment::Contained : Containment::NotContained));
        if (!expect) {
            REQUIRE(r.witness);
            for (auto& l : a) CHECK(lc_precedes(l.point, r.witness->point));
            bool outside = false;
            for (auto& l : b) outside |= !lc_precedes(l.point, r.witness->point);
            CHECK(outside);
        }
    }
}

TEST_CASE("higher-dimensional containment: sufficient condition and falsifier") {
    Poset p = Poset::minkowski(2);
    auto yes = future_contained(p, {point({2, 0, 0})}, {point({0, 0, 0})});
    CHECK(yes.status == Containment::Contained);
    auto no = future_contained(p, {point({0, 0, 0})}, {point({1, 0, 0})});
    CHECK(no.status == Containment::NotContained);
}

TEST_CASE("compatibility of the Type 4 embedding") {
    AffectsSet a = testing::corpus_set("acl4_set");
    Embedding e = corpus_embedding("acl4_embedding");
    CHECK(check_compat(a, e).compatible);
    auto k = classify_embedding(a, e);
    CHECK_FALSE(k.trivial);
    CHECK_FALSE(k.degenerate);

    Embedding moved = corpus_embedding("acl4_embedding_moved");
    auto r = check_compat(a, moved);
    CHECK_FALSE(r.compatible);
    REQUIRE(r.violated.size() == 1);
    CHECK(relation_text(r.violated[0].relation) == "B affects AC");
}

TEST_CASE("compatibility on a finite poset") {
    Embedding e;
    e.poset = Poset::finite({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
    e.locations = {{"X", element("b")}, {"Y", element("d")}};
    AffectsSet xy = AffectsSet::from_relations({{S("X"), S("Y"), {}, {}, true, true}});
    CHECK(check_compat(xy, e).compatible);
    e.locations["Y"] = element("c");
    CHECK_FALSE(check_compat(xy, e).compatible);
}

TEST_CASE("embedding search") {
    auto acl1 = find_embedding_1p1(testing::corpus_set("acl1_set"), Requirement::Nontrivial);
    CHECK_FALSE(acl1.sat);
    CHECK(acl1.reason.rfind("no nontrivial embedding", 0) == 0);
    CHECK_FALSE(find_embedding_1p1(testing::corpus_set("acl2_set"), Requirement::Nontrivial).sat);

    AffectsSet acl3 = testing::corpus_set("acl3_set");
    CHECK_FALSE(find_embedding_1p1(acl3, Requirement::Nondegenerate).sat);
    auto nt = find_embedding_1p1(acl3, Requirement::Nontrivial);
    REQUIRE(nt.sat);
    CHECK(check_compat(acl3, nt.embedding).compatible);
    CHECK(nt.embedding.at("A") == nt.embedding.at("C"));
    auto k3 = classify_embedding(acl3, nt.embedding);
    CHECK_FALSE(k3.trivial);
    CHECK(k3.degenerate);

    AffectsSet acl4 = testing::corpus_set("acl4_set");
    auto nd = find_embedding_1p1(acl4, Requirement::Nondegenerate);
    REQUIRE(nd.sat);
    CHECK(check_compat(acl4, nd.embedding).compatible);
    CHECK_FALSE(classify_embedding(acl4, nd.embedding).degenerate);
}

TEST_CASE("the incomplete-chain set of the first example embeds non-trivially") {
    // Hand-placed witness, independent of the solver.
    AffectsSet a = testing::corpus_set("acl7_set");
    Embedding e;
    e.locations = {{"A", point({0, 0})},
                   {"X", point({Rational(1, 4), Rational(1, 4)})},
                   {"Y", point({Rational(1, 2), Rational(1, 2)})},
                   {"B", point({0, 2})},
                   {"C", point({Rational(1, 2), Rational(3, 2)})}};
    CHECK(check_compat(a, e).compatible);
    auto k = classify_embedding(a, e);
    CHECK_FALSE(k.trivial);
    CHECK_FALSE(k.degenerate);
    auto found = find_embedding_1p1(a, Requirement::Nondegenerate);
    REQUIRE(found.sat);
    CHECK(check_compat(a, found.embedding).compatible);
}

TEST_CASE("stability probe") {
    AffectsSet a = testing::corpus_set("acl4_set");
    Embedding e = corpus_embedding("acl4_embedding");
    CHECK(stability_probe(a, e, Rational(1, 100), 300, 1) == 0.0);

    AffectsSet ab = AffectsSet::from_relations({{S("A"), S("B"), {}, {}, true, true}});
    Embedding robust;
    robust.locations = {{"A", point({0, 0})}, {"B", point({5, 1})}};
    CHECK(stability_probe(ab, robust, Rational(1, 100), 300, 1) == 1.0);
    CHECK(stability_probe(a, e, Rational(1, 100), 50, 9) == stability_probe(a, e, Rational(1, 100), 50, 9));
}

TEST_CASE("copies must stay in the accessible region") {
    AffectsSet ab = AffectsSet::from_relations({{S("A"), S("B"), {}, {}, true, true}});
    Embedding e;
    e.locations = {{"A", point({0, 0})}, {"B", point({2, 0})}};
    auto [a2, e2] = augment_with_copies(ab, e, {{"A", {point({1, 0})}}});
    CHECK(a2.relations.size() == 2);
    CHECK(e2.locations.count("A'"));
    CHECK(check_compat(a2, e2).compatible);
    CHECK(kind_of([&] { augment_with_copies(ab, e, {{"A", {point({-1, 0})}}}); }) == ErrorKind::CopyOutsideAccessible);
}

TEST_CASE("jamming configuration") {
    CHECK(ejam_check(corpus_embedding("ejam_embedding")));
    Embedding e = corpus_embedding("ejam_embedding");
    e.locations["B"] = point({0, 5});  // B far to the side: the joint future of X and Z leaves its future
    CHECK_FALSE(ejam_check(e));
}

TEST_CASE("missing locations") {
    AffectsSet a = testing::corpus_set("acl4_set");
    Embedding e;
    e.locations = {{"A", point({0, 0})}};
    CHECK(kind_of([&] { check_compat(a, e); }) == ErrorKind::MissingLocation);
    CHECK(kind_of([&] { e.at("Q"); }) == ErrorKind::MissingLocation);
}

TEST_CASE("embedding JSON round-trip and diagrams") {
    for (auto& name : {"acl4_embedding", "acl4_embedding_moved", "acl7_embedding", "ejam_embedding"}) {
        Embedding e = corpus_embedding(name);
        std::string once = embedding_to_json(e);
        CHECK(embedding_to_json(parse_embedding(once)) == once);
        Embedding back = parse_embedding(once);
        CHECK(back.locations == e.locations);
    }
    Embedding e = corpus_embedding("acl4_embedding");
    std::string svg = render_svg(e);
    CHECK(svg.find("<svg") != std::string::npos);
    for (auto& id : {"A", "B", "C"}) CHECK(svg.find(std::string(">") + id + "<") != std::string::npos);
    CHECK(render_ascii(e).find("*B") != std::string::npos);
    auto report = nlohmann::json::parse(compat_report_json(check_compat(testing::corpus_set("acl4_set"), e)));
    CHECK(report.at("compatible") == true);
}

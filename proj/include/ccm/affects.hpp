#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccm/checks.hpp"
#include "ccm/model.hpp"

namespace ccm {

// "source affects target given {do(do_given), obs_given}".
struct AffectsRelation {
    NodeSet source, target, do_given, obs_given;
    bool holds = false;
    std::optional<bool> irreducible;  // unknown when not computed

    bool same_sets(const AffectsRelation& o) const {
        return source == o.source && target == o.target && do_given == o.do_given && obs_given == o.obs_given;
    }
    bool operator==(const AffectsRelation& o) const {
        return same_sets(o) && holds == o.holds && irreducible == o.irreducible;
    }
};

std::string relation_text(const AffectsRelation& r);  // e.g. "B affects AC", "X does not affect Y given {do(Z), W}"

enum class Arrow { Solid, Dashed };

// Caches post-intervention distributions of one model; all affects queries go through it.
class Analyzer {
public:
    explicit Analyzer(CausalModel m);

    const CausalModel& model() const { return model_; }
    const JointDistribution& observed();                       // over observed nodes
    const JointDistribution& do_dist(const Assignment& iv);    // over all classical nodes

    bool ho_affects(const NodeSet& x, const NodeSet& y, const NodeSet& z = {}, const NodeSet& w = {});
    bool is_reducible(const AffectsRelation& rel);
    bool is_irreducible(const NodeSet& x, const NodeSet& y, const NodeSet& z = {}, const NodeSet& w = {});
    AffectsRelation decide(const NodeSet& x, const NodeSet& y, const NodeSet& z = {}, const NodeSet& w = {});

    // P_do(iv)(y | evidence) over all classical nodes; nullopt when the evidence has zero mass.
    std::optional<JointDistribution> do_conditional(const Assignment& iv, const Assignment& evidence, const NodeSet& y);

    // Assignments where exactly one side of the comparison had zero mass.
    std::size_t one_sided_skips() const { return skips_; }

private:
    CausalModel model_;
    std::map<Assignment, JointDistribution> cache_;
    std::optional<JointDistribution> observed_;
    std::size_t skips_ = 0;
};

std::vector<Assignment> assignments_of(const CausalModel& m, const NodeSet& s);

bool ho_affects(const CausalModel& m, const NodeSet& x, const NodeSet& y, const NodeSet& z = {}, const NodeSet& w = {});
bool is_reducible(const CausalModel& m, const AffectsRelation& rel);
std::map<Edge, Arrow> classify_arrows(const CausalModel& m);
std::map<Edge, Arrow> classify_arrows(Analyzer& a);

struct AffectsTable {
    std::string model;
    std::vector<AffectsRelation> relations;
    std::vector<std::pair<CITriple, bool>> dseps;  // triple, d-separated?
    std::vector<std::pair<CITriple, bool>> cis;    // triple, independent?
};

AffectsTable affects_table(const CausalModel& m, int max_set = 2);
AffectsTable affects_table(Analyzer& a, int max_set = 2);
std::string render_table_text(const AffectsTable& t);

// JSON records {from, to, do, given, holds, irreducible}.
std::string relations_to_json(const std::vector<AffectsRelation>& rels);
std::vector<AffectsRelation> parse_relations(const std::string& json_text);  // throws ParseError
std::string table_to_json(const AffectsTable& t);

// All (x, y, z, w) pairwise disjoint over `universe` with 1 <= |x|,|y| <= max_set and |z|+|w| <= max_set.
struct SetQuad {
    NodeSet x, y, z, w;
};
std::vector<SetQuad> affects_quads(const NodeSet& universe, int max_set);

struct DoCalcResult {
    bool antecedent = false;
    std::optional<bool> equality;  // nullopt when the antecedent fails
};

DoCalcResult do_calculus_verify(const CausalModel& m, int rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                                const NodeSet& w);
DoCalcResult do_calculus_verify(Analyzer& a, int rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                                const NodeSet& w);
bool do_rule_antecedent(const CausalGraph& g, int rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                        const NodeSet& w);

// Sufficient graphical conditions for "X does not affect Y given {do(Z), W}":
//   SourceSeparated  (X _|_ Y) in G_do(X), unconditional relations only
//   JointSeparated   (XZW _|_ Y) in G_do(XZ) and (ZW _|_ Y) in G_do(Z)
//   IgnoredAction    (Y _|_ X | ZW) in G_do(Z X(W))
enum class NonAffectsProof { SourceSeparated, JointSeparated, IgnoredAction };
const char* proof_name(NonAffectsProof p);
std::optional<NonAffectsProof> graphical_nonaffects(const CausalGraph& g, const NodeSet& x, const NodeSet& y,
                                                    const NodeSet& z = {}, const NodeSet& w = {});

}  // namespace ccm

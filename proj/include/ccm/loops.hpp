#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccm/affects.hpp"

namespace ccm {

// Holding affects relations with known irreducibility.
struct AffectsSet {
    std::vector<AffectsRelation> relations;

    static AffectsSet from_relations(const std::vector<AffectsRelation>& rels);  // keeps holds=true; validates
    static AffectsSet from_table(const AffectsTable& t);
    NodeSet elements() const;
};

struct LoopWitness {
    int type = 0;  // 1..10, or 0 for the cause-constraint oracle
    std::vector<AffectsRelation> chain;
    std::string notes;
};

std::string witness_text(const LoopWitness& w);
std::string witness_to_json(const LoopWitness& w);

constexpr int kDefaultLoopDepth = 2;

// Exhaustive search for a loop of the given type (1..8) among unconditional zeroth-order relations.
std::optional<LoopWitness> detect_acl(const AffectsSet& a, int type);
// Incomplete chains whose incomplete nodes are completed recursively up to max_depth levels;
// depth 1 is Types 7/8, deeper witnesses are reported as Types 9/10.
std::optional<LoopWitness> detect_acl_recursive(const AffectsSet& a, int max_depth = kDefaultLoopDepth);

struct CyclicityResult {
    bool cyclic = false;
    std::string explanation;
    std::vector<Edge> acyclic_witness;  // cause relations consistent with every constraint, when not cyclic
};

constexpr std::size_t kDefaultOracleBudget = 2000000;
CyclicityResult cyclicity_certificate(const AffectsSet& a, std::size_t budget = kDefaultOracleBudget);

bool hidden_loop_check(const CausalModel& m, const CausalModel& candidate);

}  // namespace ccm

#pragma once

#include <array>
#include <string>
#include <vector>

#include "ccm/model.hpp"

namespace ccm {

struct CITriple {
    NodeSet x, y, z;
    bool operator==(const CITriple& o) const { return x == o.x && y == o.y && z == o.z; }
    bool operator<(const CITriple& o) const;
};
std::string triple_text(const CITriple& t, const char* rel = "_||_");

struct Violation {
    std::string kind;
    CITriple sets;
    std::string detail;
};

struct ModelReport {
    std::vector<Violation> violations;
    bool passed() const { return violations.empty(); }
};

// All triples of pairwise disjoint subsets of `universe` with x, y nonempty,
// listed once per unordered {x, y} pair, z possibly empty.
std::vector<CITriple> disjoint_triples(const NodeSet& universe, std::size_t max_total = 64);

ModelReport check_dsep_property(const CausalModel& m);
ModelReport check_dsep_property(const CausalGraph& g, const JointDistribution& observed);
bool check_markov_factorization(const CausalModel& m);
bool check_markov_factorization(const CausalGraph& g, const JointDistribution& full);
std::vector<CITriple> fine_tuned_independences(const CausalModel& m);
std::vector<CITriple> fine_tuned_independences(const CausalGraph& g, const JointDistribution& observed);
std::vector<CITriple> implied_independences(const CausalGraph& g, const CITriple& base, const NodeSet& s);

// P(XYZ | ABC) with finite settings and outcomes, indexed [a][b][c][x][y][z].
class TripartiteConditional {
public:
    TripartiteConditional(std::array<int, 3> settings, std::array<int, 3> outcomes, std::vector<Rational> table);

    const std::array<int, 3>& settings() const { return settings_; }
    const std::array<int, 3>& outcomes() const { return outcomes_; }
    const Rational& p(int a, int b, int c, int x, int y, int z) const;
    void validate() const;  // throws MalformedConditional

    // Reads P(XYZ|ABC) off a joint distribution containing the six named variables.
    static TripartiteConditional from_joint(const JointDistribution& d, const std::array<std::string, 3>& settings,
                                            const std::array<std::string, 3>& outcomes);

private:
    std::array<int, 3> settings_, outcomes_;
    std::vector<Rational> table_;
};

bool check_ns3prime(const TripartiteConditional& p);

}  // namespace ccm

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccm/loops.hpp"
#include "ccm/prob.hpp"

namespace ccm {

using Point = std::vector<Rational>;  // (t, x1, ..., xd)

// A location is a named element of a finite poset or a point of Minkowski space-time.
struct Location {
    std::string element;
    Point point;
    bool operator==(const Location& o) const { return element == o.element && point == o.point; }
};

std::string location_text(const Location& l);

class Poset {
public:
    enum class Kind { Finite, Minkowski };

    static Poset finite(std::vector<std::string> elements, std::vector<std::pair<std::string, std::string>> covers);
    static Poset minkowski(int spatial_dims);

    Kind kind() const { return kind_; }
    int spatial_dims() const { return dims_; }
    const std::vector<std::string>& elements() const { return elements_; }
    const std::vector<std::pair<std::string, std::string>>& covers() const { return covers_; }

    bool precedes(const Location& a, const Location& b) const;  // a ⪯ b; throws UnknownElement
    void check(const Location& l) const;                        // throws UnknownElement
    int element_index(const std::string& e) const;

private:
    Kind kind_ = Kind::Minkowski;
    int dims_ = 1;
    std::vector<std::string> elements_;
    std::vector<std::pair<std::string, std::string>> covers_;
    std::vector<std::vector<bool>> leq_;
};

Location point(std::initializer_list<Rational> coords);
Location element(const std::string& id);

enum class Containment { Contained, NotContained, Inconclusive };

struct ContainmentResult {
    Containment status = Containment::Inconclusive;
    std::optional<Location> witness;  // a point of the left region outside the right one
};

struct SamplingConfig {
    int samples = 4000;
    std::uint64_t seed = 12345;
};

// Decides ∩_{a∈A} F̄(a) ⊆ ∩_{b∈B} F̄(b). Exact on finite posets and in (1+1) dimensions;
// in higher dimensions only a sampling falsifier and the trivial sufficient condition are used.
ContainmentResult future_contained(const Poset& p, const std::vector<Location>& a, const std::vector<Location>& b,
                                   const SamplingConfig& cfg = {});

// Light-cone join of (1+1) points: the earliest point of their joint future.
Location join_1p1(const std::vector<Location>& pts);

struct Embedding {
    Poset poset = Poset::minkowski(1);
    std::map<std::string, Location> locations;
    bool accessible_future = true;                          // compat2: accessible region = inclusive future
    std::map<std::string, std::vector<std::string>> accessible;  // explicit regions (finite posets only)

    const Location& at(const std::string& id) const;  // throws MissingLocation
    void validate() const;
};

enum class CompatMode { Compat, Compat1Prime };

struct CompatViolation {
    AffectsRelation relation;
    std::optional<Location> witness;
};

struct CompatReport {
    bool compatible = true;
    std::vector<CompatViolation> violated;
    CompatMode mode = CompatMode::Compat;
};

// Relations that constrain an embedding: holding and irreducible (single-source relations always are).
bool imposes_constraint(const AffectsRelation& r);

CompatReport check_compat(const AffectsSet& a, const Embedding& e, CompatMode mode = CompatMode::Compat,
                          const SamplingConfig& cfg = {});

struct EmbeddingClass {
    bool trivial = false;
    bool degenerate = false;
};
EmbeddingClass classify_embedding(const AffectsSet& a, const Embedding& e);

enum class Requirement { Nontrivial, Nondegenerate };

struct EmbedSearchResult {
    bool sat = false;
    Embedding embedding;
    std::string reason;
    std::vector<AffectsRelation> blocking;
};

constexpr std::size_t kDefaultEmbedBudget = 1000000;
EmbedSearchResult find_embedding_1p1(const AffectsSet& a, Requirement req, std::size_t budget = kDefaultEmbedBudget);

double stability_probe(const AffectsSet& a, const Embedding& e, const Rational& eps, int trials, std::uint64_t seed);

std::pair<AffectsSet, Embedding> augment_with_copies(const AffectsSet& a, const Embedding& e,
                                                     const std::map<std::string, std::vector<Location>>& copies);

struct JamRoles {
    std::string a = "A", b = "B", c = "C", x = "X", y = "Y", z = "Z";
};
bool ejam_check(const Embedding& e, const JamRoles& roles = {}, const SamplingConfig& cfg = {});

// JSON and diagrams.
Embedding parse_embedding(const std::string& json_text);
std::string embedding_to_json(const Embedding& e);
std::string compat_report_json(const CompatReport& r);
std::string render_ascii(const Embedding& e, int width = 61, int height = 25);
std::string render_svg(const Embedding& e);

}  // namespace ccm

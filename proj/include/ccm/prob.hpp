#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccm/graph.hpp"

namespace ccm {

using Rational = mpq_class;
using Assignment = std::map<std::string, int>;

Rational parse_rational(const std::string& text);  // "p/q" or integer; throws ParseError
std::string rational_text(const Rational& q);       // "p/q", or "p" when integral

struct Variable {
    std::string id;
    int card = 2;
    bool operator==(const Variable& o) const { return id == o.id && card == o.card; }
};

// Exact joint distribution, stored densely in mixed radix with the first
// variable most significant.
class JointDistribution {
public:
    JointDistribution() = default;
    JointDistribution(std::vector<Variable> vars, std::vector<Rational> weights);

    static JointDistribution uniform(std::vector<Variable> vars);
    static JointDistribution point_mass(std::vector<Variable> vars, const std::vector<int>& values);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Rational>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

    bool has(const std::string& id) const;
    int position(const std::string& id) const;  // throws UnknownVariable
    int card(const std::string& id) const;
    NodeSet ids() const;

    std::vector<int> decode(std::size_t index) const;
    std::size_t encode(const std::vector<int>& values) const;
    const Rational& at(const std::vector<int>& values) const { return weights_[encode(values)]; }
    Rational prob(const Assignment& partial) const;  // marginal mass of a partial assignment

    std::string to_string() const;
    bool operator==(const JointDistribution& o) const { return vars_ == o.vars_ && weights_ == o.weights_; }

private:
    std::vector<Variable> vars_;
    std::vector<Rational> weights_;
};

JointDistribution marginal(const JointDistribution& d, const NodeSet& keep);
// Restriction to the evidence, renormalized, over the non-evidence variables.
// nullopt when the evidence has zero mass.
std::optional<JointDistribution> condition(const JointDistribution& d, const Assignment& evidence);
bool cond_independent(const JointDistribution& d, const NodeSet& x, const NodeSet& y, const NodeSet& z);

// Enumerate all assignments of the given variables in mixed-radix order.
std::vector<Assignment> all_assignments(const std::vector<Variable>& vars);

}  // namespace ccm

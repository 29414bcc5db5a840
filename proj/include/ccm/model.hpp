#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccm/graph.hpp"
#include "ccm/prob.hpp"
#include "ccm/quantum.hpp"

namespace ccm {

// ---- mechanisms -----------------------------------------------------------

struct ExprNode {
    enum class Op { Var, Const, Xor, And, Or, Not, Copy };
    Op op = Op::Const;
    std::string var;  // Var / Copy
    int value = 0;    // Const
    std::vector<ExprNode> args;
};

ExprNode parse_expr(const std::string& text);  // throws ParseError
std::string expr_text(const ExprNode& e);
int eval_expr(const ExprNode& e, const std::function<int(const std::string&)>& lookup);
NodeSet expr_vars(const ExprNode& e);

struct TableMechanism {
    std::vector<std::string> parents;  // first parent most significant
    std::vector<int> rows;
};

struct ExprMechanism {
    std::vector<std::string> parents;
    std::string text;
    ExprNode root;
};

using ScalarMatrix = std::vector<std::vector<Scalar>>;

struct MeasurementMechanism {
    std::string quantum_parent;
    std::vector<int> factors;
    std::vector<std::string> setting_parents;  // first most significant
    int outcomes = 2;
    std::vector<std::vector<ScalarMatrix>> effects;  // [setting][outcome]
};

using Mechanism = std::variant<TableMechanism, ExprMechanism, MeasurementMechanism>;
std::vector<std::string> mechanism_parents(const Mechanism& m);

CMatrix to_cmatrix(const ScalarMatrix& m);

// ---- exogenous priors -----------------------------------------------------

struct ClassicalPrior {
    std::vector<Rational> probs;
};

struct QuantumPrior {
    std::vector<int> dims;
    std::vector<Scalar> amplitudes;  // pure state when nonempty
    ScalarMatrix rho;                // otherwise a density matrix
    QuantumState state() const;
};

using ExogenousSpec = std::variant<ClassicalPrior, QuantumPrior>;

// ---- model ------------------------------------------------------------------

enum class Semantics { FixedPoint, PostSelect };

struct PostSelectConfig {
    std::vector<Edge> cut_edges;
    std::map<std::string, std::vector<Rational>> star_prior;  // sources not listed get a uniform prior
};

struct CausalModel {
    std::string name;
    CausalGraph graph;
    std::map<std::string, int> cards;  // classical nodes only
    std::map<std::string, Mechanism> mechanisms;
    std::map<std::string, ExogenousSpec> exogenous;
    Semantics semantics = Semantics::FixedPoint;
    PostSelectConfig post_select;

    int card(const std::string& id) const;
    bool is_quantum(const std::string& id) const;
    bool has_quantum() const;
    std::vector<Variable> classical_variables() const;  // graph order, quantum nodes skipped
    std::vector<Variable> observed_variables() const;
    void validate() const;  // throws InvalidModel
};

// ---- evaluation -------------------------------------------------------------

struct Evaluation {
    JointDistribution exact;     // over all classical nodes in graph order
    std::vector<double> numeric; // same indexing; computed in floating point when quantum nodes are present
    bool quantum = false;
};

// Evaluates the model with the given observed nodes held fixed by intervention
// (mechanism replaced by the constant, incoming edges cut).
Evaluation evaluate(const CausalModel& m, const Assignment& interventions = {});
JointDistribution full_distribution(const CausalModel& m, const Assignment& interventions = {});
JointDistribution observed_distribution(const CausalModel& m);
std::vector<double> observed_distribution_numeric(const CausalModel& m);
JointDistribution do_distribution(const CausalModel& m, const Assignment& interventions);

// Best rational approximation with denominator <= max_den; nullopt when none is within tol.
std::optional<Rational> snap_rational(double x, long max_den = 1L << 20, double tol = 1e-9);

}  // namespace ccm

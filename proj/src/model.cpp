#include "ccm/model.hpp"

#include <algorithm>
#include <cctype>

#include "ccm/error.hpp"

namespace ccm {

// ---- expressions --------------------------------------------------------------

namespace {

struct ExprParser {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorKind::ParseError, "expression '" + s + "': " + why + " at offset " + std::to_string(pos));
    }
    std::string word() {
        skip();
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '\''))
            ++pos;
        if (start == pos) fail("expected a name or number");
        return s.substr(start, pos - start);
    }
    bool peek(char c) {
        skip();
        return pos < s.size() && s[pos] == c;
    }
    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    ExprNode parse() {
        std::string w = word();
        ExprNode n;
        if (std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            n.op = ExprNode::Op::Const;
            n.value = std::stoi(w);
            return n;
        }
        if (!peek('(')) {
            n.op = ExprNode::Op::Var;
            n.var = w;
            return n;
        }
        expect('(');
        if (w == "const") {
            std::string k = word();
            if (!std::all_of(k.begin(), k.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                fail("const needs an integer");
            n.op = ExprNode::Op::Const;
            n.value = std::stoi(k);
            expect(')');
            return n;
        }
        if (w == "copy") {
            n.op = ExprNode::Op::Copy;
            n.var = word();
            expect(')');
            return n;
        }
        if (w == "xor") n.op = ExprNode::Op::Xor;
        else if (w == "and") n.op = ExprNode::Op::And;
        else if (w == "or") n.op = ExprNode::Op::Or;
        else if (w == "not") n.op = ExprNode::Op::Not;
        else fail("unknown operator " + w);
        n.args.push_back(parse());
        while (peek(',')) {
            ++pos;
            n.args.push_back(parse());
        }
        expect(')');
        if (n.op == ExprNode::Op::Not && n.args.size() != 1) fail("not takes one argument");
        return n;
    }
};

}  // namespace

ExprNode parse_expr(const std::string& text) {
    ExprParser p{text};
    ExprNode n = p.parse();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return n;
}

std::string expr_text(const ExprNode& e) {
    switch (e.op) {
        case ExprNode::Op::Var: return e.var;
        case ExprNode::Op::Const: return "const(" + std::to_string(e.value) + ")";
        case ExprNode::Op::Copy: return "copy(" + e.var + ")";
        default: break;
    }
    std::string name = e.op == ExprNode::Op::Xor ? "xor" : e.op == ExprNode::Op::And ? "and" : e.op == ExprNode::Op::Or ? "or" : "not";
    std::string out = name + "(";
    for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? "," : "") + expr_text(e.args[i]);
    return out + ")";
}

int eval_expr(const ExprNode& e, const std::function<int(const std::string&)>& lookup) {
    switch (e.op) {
        case ExprNode::Op::Var:
        case ExprNode::Op::Copy: return lookup(e.var);
        case ExprNode::Op::Const: return e.value;
        case ExprNode::Op::Not: return eval_expr(e.args[0], lookup) ? 0 : 1;
        case ExprNode::Op::Xor: {
            int v = 0;
            for (auto& a : e.args) v ^= eval_expr(a, lookup) & 1;
            return v;
        }
        case ExprNode::Op::And: {
            for (auto& a : e.args)
                if (!eval_expr(a, lookup)) return 0;
            return 1;
        }
        case ExprNode::Op::Or: {
            for (auto& a : e.args)
                if (eval_expr(a, lookup)) return 1;
            return 0;
        }
    }
    return 0;
}

NodeSet expr_vars(const ExprNode& e) {
    NodeSet s;
    if (e.op == ExprNode::Op::Var || e.op == ExprNode::Op::Copy) s.insert(e.var);
    for (auto& a : e.args) {
        auto sub = expr_vars(a);
        s.insert(sub.begin(), sub.end());
    }
    return s;
}

std::vector<std::string> mechanism_parents(const Mechanism& m) {
    if (auto t = std::get_if<TableMechanism>(&m)) return t->parents;
    if (auto x = std::get_if<ExprMechanism>(&m)) return x->parents;
    auto& q = std::get<MeasurementMechanism>(m);
    std::vector<std::string> p{q.quantum_parent};
    p.insert(p.end(), q.setting_parents.begin(), q.setting_parents.end());
    return p;
}

CMatrix to_cmatrix(const ScalarMatrix& m) {
    CMatrix c(static_cast<int>(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (m[r].size() != m.size()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
        for (std::size_t k = 0; k < m.size(); ++k) c(static_cast<int>(r), static_cast<int>(k)) = m[r][k].value;
    }
    return c;
}

QuantumState QuantumPrior::state() const {
    if (!amplitudes.empty()) {
        std::vector<Complex> a;
        for (auto& s : amplitudes) a.push_back(s.value);
        return QuantumState::pure(dims, a);
    }
    return QuantumState::mixed(dims, to_cmatrix(rho));
}

// ---- model --------------------------------------------------------------------

int CausalModel::card(const std::string& id) const {
    auto it = cards.find(id);
    if (it == cards.end()) {
        graph.index(id);
        throw Error(ErrorKind::InvalidInput, id + " is not a classical variable");
    }
    return it->second;
}

bool CausalModel::is_quantum(const std::string& id) const { return graph.node(id).sort == Sort::Quantum; }

bool CausalModel::has_quantum() const {
    for (auto& n : graph.nodes())
        if (n.sort == Sort::Quantum) return true;
    return false;
}

std::vector<Variable> CausalModel::classical_variables() const {
    std::vector<Variable> v;
    for (auto& n : graph.nodes())
        if (n.sort == Sort::Classical) v.push_back({n.id, card(n.id)});
    return v;
}

std::vector<Variable> CausalModel::observed_variables() const {
    std::vector<Variable> v;
    for (auto& n : graph.nodes())
        if (n.visibility == Visibility::Observed) v.push_back({n.id, card(n.id)});
    return v;
}

namespace {

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorKind::InvalidModel, why); }

void check_prior(const std::vector<Rational>& probs, int card, const std::string& what) {
    if (static_cast<int>(probs.size()) != card) invalid(what + ": prior length differs from cardinality");
    Rational total = 0;
    for (auto& p : probs) {
        if (p < 0) invalid(what + ": negative probability");
        total += p;
    }
    if (total != 1) invalid(what + ": prior does not sum to 1");
}

std::size_t radix_size(const CausalModel& m, const std::vector<std::string>& ids) {
    std::size_t n = 1;
    for (auto& id : ids) n *= static_cast<std::size_t>(m.card(id));
    return n;
}

}  // namespace

void CausalModel::validate() const {
    for (auto& n : graph.nodes()) {
        bool has_mech = mechanisms.count(n.id) > 0;
        bool has_exo = exogenous.count(n.id) > 0;
        if (has_mech == has_exo) invalid(n.id + " needs exactly one of a mechanism or an exogenous prior");
        if (n.sort == Sort::Classical) {
            auto it = cards.find(n.id);
            if (it == cards.end() || it->second < 1) invalid(n.id + " has no valid cardinality");
        } else if (cards.count(n.id)) {
            invalid("quantum node " + n.id + " cannot carry a classical cardinality");
        }
        if (has_exo) {
            if (!graph.parents(n.id).empty()) invalid("exogenous node " + n.id + " has parents");
            const auto& spec = exogenous.at(n.id);
            if (n.sort == Sort::Quantum) {
                auto q = std::get_if<QuantumPrior>(&spec);
                if (!q) invalid("quantum node " + n.id + " needs a quantum state");
                try {
                    validate_state(q->state());
                } catch (const Error& e) {
                    invalid(n.id + ": " + e.what());
                }
            } else {
                auto c = std::get_if<ClassicalPrior>(&spec);
                if (!c) invalid("classical node " + n.id + " needs a probability vector");
                check_prior(c->probs, cards.at(n.id), n.id);
            }
        } else if (n.sort == Sort::Quantum) {
            invalid("quantum node " + n.id + " must be exogenous");
        }
    }
    for (auto& [id, mech] : mechanisms) {
        if (!graph.has_node(id)) invalid("mechanism for undeclared node " + id);
        auto plist = mechanism_parents(mech);
        NodeSet pset(plist.begin(), plist.end());
        if (pset.size() != plist.size()) invalid(id + ": repeated parent");
        if (pset != graph.parents(id)) invalid(id + ": mechanism parents differ from graph parents");
        int out_card = card(id);
        if (auto t = std::get_if<TableMechanism>(&mech)) {
            for (auto& p : t->parents)
                if (is_quantum(p)) invalid(id + ": table reads quantum node " + p);
            if (t->rows.size() != radix_size(*this, t->parents)) invalid(id + ": table does not cover every parent assignment");
            for (int r : t->rows)
                if (r < 0 || r >= out_card) invalid(id + ": table value out of range");
        } else if (auto x = std::get_if<ExprMechanism>(&mech)) {
            for (auto& p : x->parents)
                if (is_quantum(p)) invalid(id + ": expression reads quantum node " + p);
            if (!subset_of(expr_vars(x->root), pset)) invalid(id + ": expression references a non-parent");
            std::vector<Variable> pv;
            for (auto& p : x->parents) pv.push_back({p, card(p)});
            for (auto& a : all_assignments(pv)) {
                int v = eval_expr(x->root, [&](const std::string& k) { return a.at(k); });
                if (v < 0 || v >= out_card) invalid(id + ": expression value out of range");
            }
        } else {
            auto& q = std::get<MeasurementMechanism>(mech);
            if (!graph.has_node(q.quantum_parent) || !is_quantum(q.quantum_parent))
                invalid(id + ": measurement parent must be a quantum node");
            for (auto& p : q.setting_parents)
                if (is_quantum(p)) invalid(id + ": setting parent " + p + " is quantum");
            if (q.outcomes != out_card) invalid(id + ": outcome count differs from cardinality");
            if (q.effects.size() != radix_size(*this, q.setting_parents)) invalid(id + ": one POVM per setting required");
            auto st = std::get<QuantumPrior>(exogenous.at(q.quantum_parent)).dims;
            int need = 1;
            NodeSet seen;
            for (int f : q.factors) {
                if (f < 0 || f >= static_cast<int>(st.size())) invalid(id + ": factor index out of range");
                if (!seen.insert(std::to_string(f)).second) invalid(id + ": repeated factor");
                need *= st[f];
            }
            for (auto& povm : q.effects) {
                if (static_cast<int>(povm.size()) != q.outcomes) invalid(id + ": POVM size differs from outcome count");
                std::vector<CMatrix> mats;
                for (auto& e : povm) {
                    mats.push_back(to_cmatrix(e));
                    if (mats.back().n != need) invalid(id + ": effect dimension does not match factors");
                }
                try {
                    validate_povm(mats);
                } catch (const Error& e) {
                    invalid(id + ": " + e.what());
                }
            }
        }
    }
    // Quantum nodes feed only measurements, on disjoint factors.
    for (auto& n : graph.nodes()) {
        if (n.sort != Sort::Quantum) continue;
        std::set<int> used;
        for (auto& c : graph.children(n.id)) {
            auto it = mechanisms.find(c);
            auto q = it == mechanisms.end() ? nullptr : std::get_if<MeasurementMechanism>(&it->second);
            if (!q || q->quantum_parent != n.id) invalid("quantum node " + n.id + " feeds a non-measurement " + c);
            for (int f : q->factors)
                if (!used.insert(f).second) invalid("factor " + std::to_string(f) + " of " + n.id + " measured twice");
        }
    }
    if (semantics == Semantics::FixedPoint) {
        if (!post_select.cut_edges.empty()) invalid("cut edges given without post_select semantics");
        for (auto& [id, mech] : mechanisms) {
            if (!std::holds_alternative<MeasurementMechanism>(mech)) continue;
            if (graph.reach_mask(1u << graph.index(id), Direction::Forward) >> graph.index(id) & 1u)
                invalid(id + ": measurement on a directed cycle needs post_select semantics");
        }
    } else {
        NodeSet sources;
        for (auto& e : post_select.cut_edges) {
            if (!graph.has_node(e.first) || !graph.has_node(e.second) || !graph.has_edge(e.first, e.second))
                invalid("cut edge " + e.first + "->" + e.second + " is not a graph edge");
            if (is_quantum(e.first) || is_quantum(e.second)) invalid("cut edges must join classical nodes");
            sources.insert(e.first);
        }
        std::vector<Edge> kept;
        for (auto& e : graph.edges())
            if (std::find(post_select.cut_edges.begin(), post_select.cut_edges.end(), e) == post_select.cut_edges.end())
                kept.push_back(e);
        if (!CausalGraph(graph.nodes(), kept).is_acyclic()) invalid("removing the cut edges leaves a directed cycle");
        for (auto& [src, probs] : post_select.star_prior) {
            if (!sources.count(src)) invalid("star prior for " + src + ", which is not a cut source");
            check_prior(probs, card(src), "star prior of " + src);
        }
    }
}

}  // namespace ccm

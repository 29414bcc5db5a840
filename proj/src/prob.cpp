#include "ccm/prob.hpp"

#include <sstream>

#include "ccm/error.hpp"

namespace ccm {

Rational parse_rational(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != ' ') t += c;
    if (t.empty()) throw Error(ErrorKind::ParseError, "empty rational literal");
    for (std::size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '/' || (c == '-' && i == 0);
        if (!ok) throw Error(ErrorKind::ParseError, "bad rational literal '" + text + "'");
    }
    Rational q;
    if (q.set_str(t, 10) != 0) throw Error(ErrorKind::ParseError, "bad rational literal '" + text + "'");
    if (t.find('/') != std::string::npos && q.get_den() == 0)
        throw Error(ErrorKind::ParseError, "zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

std::string rational_text(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_str();
}

JointDistribution::JointDistribution(std::vector<Variable> vars, std::vector<Rational> weights)
    : vars_(std::move(vars)), weights_(std::move(weights)) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].card < 1) throw Error(ErrorKind::InvalidInput, "cardinality of " + vars_[i].id + " < 1");
        for (std::size_t j = 0; j < i; ++j)
            if (vars_[j].id == vars_[i].id) throw Error(ErrorKind::InvalidInput, "duplicate variable " + vars_[i].id);
        n *= static_cast<std::size_t>(vars_[i].card);
    }
    if (weights_.size() != n) throw Error(ErrorKind::DimensionMismatch, "weight vector has wrong length");
    Rational total = 0;
    for (auto& w : weights_) {
        w.canonicalize();
        if (w < 0) throw Error(ErrorKind::InvalidInput, "negative probability");
        total += w;
    }
    if (total != 1) throw Error(ErrorKind::InvalidInput, "weights sum to " + rational_text(total) + ", not 1");
}

JointDistribution JointDistribution::uniform(std::vector<Variable> vars) {
    std::size_t n = 1;
    for (auto& v : vars) n *= static_cast<std::size_t>(v.card);
    return JointDistribution(std::move(vars), std::vector<Rational>(n, Rational(1, static_cast<unsigned long>(n))));
}

JointDistribution JointDistribution::point_mass(std::vector<Variable> vars, const std::vector<int>& values) {
    std::size_t n = 1;
    for (auto& v : vars) n *= static_cast<std::size_t>(v.card);
    std::vector<Rational> w(n, Rational(0));
    JointDistribution shape;
    shape.vars_ = vars;
    w[shape.encode(values)] = 1;
    return JointDistribution(std::move(vars), std::move(w));
}

bool JointDistribution::has(const std::string& id) const {
    for (auto& v : vars_)
        if (v.id == id) return true;
    return false;
}

int JointDistribution::position(const std::string& id) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].id == id) return static_cast<int>(i);
    throw Error(ErrorKind::UnknownVariable, id);
}

int JointDistribution::card(const std::string& id) const { return vars_[position(id)].card; }

NodeSet JointDistribution::ids() const {
    NodeSet s;
    for (auto& v : vars_) s.insert(v.id);
    return s;
}

std::vector<int> JointDistribution::decode(std::size_t index) const {
    std::vector<int> vals(vars_.size());
    for (std::size_t i = vars_.size(); i-- > 0;) {
        vals[i] = static_cast<int>(index % static_cast<std::size_t>(vars_[i].card));
        index /= static_cast<std::size_t>(vars_[i].card);
    }
    return vals;
}

std::size_t JointDistribution::encode(const std::vector<int>& values) const {
    if (values.size() != vars_.size()) throw Error(ErrorKind::DimensionMismatch, "assignment length");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (values[i] < 0 || values[i] >= vars_[i].card)
            throw Error(ErrorKind::InvalidInput, "value out of range for " + vars_[i].id);
        idx = idx * static_cast<std::size_t>(vars_[i].card) + static_cast<std::size_t>(values[i]);
    }
    return idx;
}

Rational JointDistribution::prob(const Assignment& partial) const {
    std::vector<std::pair<int, int>> fixed;
    for (auto& [id, val] : partial) fixed.emplace_back(position(id), val);
    Rational total = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] == 0) continue;
        auto vals = decode(i);
        bool match = true;
        for (auto& [p, v] : fixed)
            if (vals[p] != v) {
                match = false;
                break;
            }
        if (match) total += weights_[i];
    }
    return total;
}

std::string JointDistribution::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] == 0) continue;
        auto vals = decode(i);
        for (std::size_t k = 0; k < vars_.size(); ++k) os << (k ? " " : "") << vars_[k].id << "=" << vals[k];
        os << " : " << rational_text(weights_[i]) << "\n";
    }
    return os.str();
}

JointDistribution marginal(const JointDistribution& d, const NodeSet& keep) {
    std::vector<int> pos;
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < d.variables().size(); ++i)
        if (keep.count(d.variables()[i].id)) {
            pos.push_back(static_cast<int>(i));
            vars.push_back(d.variables()[i]);
        }
    for (auto& id : keep) d.position(id);
    JointDistribution shape = JointDistribution::uniform(vars);
    std::vector<Rational> w(shape.size(), Rational(0));
    std::vector<int> sub(pos.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.weights()[i] == 0) continue;
        auto vals = d.decode(i);
        for (std::size_t k = 0; k < pos.size(); ++k) sub[k] = vals[pos[k]];
        w[shape.encode(sub)] += d.weights()[i];
    }
    return JointDistribution(vars, std::move(w));
}

std::optional<JointDistribution> condition(const JointDistribution& d, const Assignment& evidence) {
    std::vector<std::pair<int, int>> fixed;
    for (auto& [id, val] : evidence) {
        int p = d.position(id);
        if (val < 0 || val >= d.variables()[p].card) return std::nullopt;
        fixed.emplace_back(p, val);
    }
    std::vector<int> pos;
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < d.variables().size(); ++i)
        if (!evidence.count(d.variables()[i].id)) {
            pos.push_back(static_cast<int>(i));
            vars.push_back(d.variables()[i]);
        }
    JointDistribution shape = JointDistribution::uniform(vars);
    std::vector<Rational> w(shape.size(), Rational(0));
    Rational mass = 0;
    std::vector<int> sub(pos.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.weights()[i] == 0) continue;
        auto vals = d.decode(i);
        bool match = true;
        for (auto& [p, v] : fixed)
            if (vals[p] != v) {
                match = false;
                break;
            }
        if (!match) continue;
        for (std::size_t k = 0; k < pos.size(); ++k) sub[k] = vals[pos[k]];
        w[shape.encode(sub)] += d.weights()[i];
        mass += d.weights()[i];
    }
    if (mass == 0) return std::nullopt;
    for (auto& x : w) x /= mass;
    return JointDistribution(vars, std::move(w));
}

bool cond_independent(const JointDistribution& d, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    require_disjoint({&x, &y, &z});
    if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidInput, "independence test needs nonempty X and Y");
    auto pxyz = marginal(d, set_union(set_union(x, y), z));
    auto pxz = marginal(d, set_union(x, z));
    auto pyz = marginal(d, set_union(y, z));
    auto pz = marginal(d, z);
    const auto& vars = pxyz.variables();
    for (std::size_t i = 0; i < pxyz.size(); ++i) {
        auto vals = pxyz.decode(i);
        Assignment ax, ay, az;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (x.count(vars[k].id)) ax[vars[k].id] = vals[k];
            else if (y.count(vars[k].id)) ay[vars[k].id] = vals[k];
            else az[vars[k].id] = vals[k];
        }
        Rational p_z = z.empty() ? Rational(1) : pz.prob(az);
        if (p_z == 0) continue;
        Assignment axz = ax, ayz = ay;
        axz.insert(az.begin(), az.end());
        ayz.insert(az.begin(), az.end());
        if (pxyz.weights()[i] * p_z != pxz.prob(axz) * pyz.prob(ayz)) return false;
    }
    return true;
}

std::vector<Assignment> all_assignments(const std::vector<Variable>& vars) {
    std::vector<Assignment> out;
    std::vector<int> vals(vars.size(), 0);
    while (true) {
        Assignment a;
        for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i].id] = vals[i];
        out.push_back(std::move(a));
        std::size_t k = vars.size();
        while (k > 0) {
            --k;
            if (++vals[k] < vars[k].card) break;
            vals[k] = 0;
            if (k == 0) return out;
        }
        if (vars.empty()) return out;
    }
}

}  // namespace ccm

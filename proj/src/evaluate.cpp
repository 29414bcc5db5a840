#include <algorithm>
#include <cmath>

#include "ccm/error.hpp"
#include "ccm/model.hpp"

namespace ccm {

namespace {

struct CVar {
    enum class Kind { Exo, Det, Meas };
    std::string id;
    int card = 2;
    Kind kind = Kind::Exo;
    std::vector<Rational> prior;        // Exo
    std::vector<int> parents;           // Det: mechanism inputs; Meas: setting inputs
    std::vector<int> table;             // Det, mixed radix over parents
    int quantum = -1;                   // Meas: index into latents
    std::vector<int> factors;           // Meas
    std::vector<std::vector<CMatrix>> effects;  // Meas: [setting][outcome]
    int star_of = -1;                   // star copies point at their source
};

struct Compiled {
    std::vector<CVar> vars;
    std::vector<QuantumState> latents;
    std::size_t n_classical = 0;
};

int radix_index(const std::vector<int>& parents, const std::vector<int>& vals, const std::vector<CVar>& vars) {
    int idx = 0;
    for (int p : parents) idx = idx * vars[p].card + vals[p];
    return idx;
}

Compiled compile(const CausalModel& m, const Assignment& interventions) {
    Compiled c;
    std::map<std::string, int> pos, qpos;
    for (auto& n : m.graph.nodes()) {
        if (n.sort == Sort::Quantum) {
            qpos[n.id] = static_cast<int>(c.latents.size());
            c.latents.push_back(std::get<QuantumPrior>(m.exogenous.at(n.id)).state());
            continue;
        }
        pos[n.id] = static_cast<int>(c.vars.size());
        CVar v;
        v.id = n.id;
        v.card = m.card(n.id);
        c.vars.push_back(v);
    }
    c.n_classical = c.vars.size();

    for (auto& [id, val] : interventions) {
        if (!m.graph.has_node(id)) throw Error(ErrorKind::UnknownNode, id);
        if (m.graph.node(id).visibility != Visibility::Observed)
            throw Error(ErrorKind::InvalidInput, "cannot intervene on latent node " + id);
        if (val < 0 || val >= m.card(id)) throw Error(ErrorKind::InvalidInput, "intervention value out of range for " + id);
    }

    // Post-selection: cut edges into intervened nodes disappear with the intervention.
    std::map<std::string, int> star_index;
    std::map<std::string, std::map<std::string, std::string>> rename;  // target -> (source -> star)
    if (m.semantics == Semantics::PostSelect) {
        for (auto& e : m.post_select.cut_edges) {
            if (interventions.count(e.second)) continue;
            if (!star_index.count(e.first)) {
                CVar s;
                s.id = e.first + "*";
                s.card = m.card(e.first);
                s.star_of = pos.at(e.first);
                auto it = m.post_select.star_prior.find(e.first);
                if (it != m.post_select.star_prior.end()) s.prior = it->second;
                else s.prior.assign(static_cast<std::size_t>(s.card), Rational(1, static_cast<unsigned long>(s.card)));
                star_index[e.first] = static_cast<int>(c.vars.size());
                c.vars.push_back(s);
            }
            rename[e.second][e.first] = e.first + "*";
        }
    }
    auto resolve = [&](const std::string& target, const std::string& parent) {
        auto it = rename.find(target);
        if (it != rename.end() && it->second.count(parent)) return star_index.at(parent);
        return pos.at(parent);
    };

    for (std::size_t i = 0; i < c.n_classical; ++i) {
        CVar& v = c.vars[i];
        auto iv = interventions.find(v.id);
        if (iv != interventions.end()) {
            v.kind = CVar::Kind::Exo;
            v.prior.assign(static_cast<std::size_t>(v.card), Rational(0));
            v.prior[static_cast<std::size_t>(iv->second)] = 1;
            continue;
        }
        auto ex = m.exogenous.find(v.id);
        if (ex != m.exogenous.end()) {
            v.kind = CVar::Kind::Exo;
            v.prior = std::get<ClassicalPrior>(ex->second).probs;
            continue;
        }
        const Mechanism& mech = m.mechanisms.at(v.id);
        if (auto q = std::get_if<MeasurementMechanism>(&mech)) {
            v.kind = CVar::Kind::Meas;
            v.quantum = qpos.at(q->quantum_parent);
            v.factors = q->factors;
            for (auto& p : q->setting_parents) v.parents.push_back(resolve(v.id, p));
            for (auto& povm : q->effects) {
                std::vector<CMatrix> mats;
                for (auto& e : povm) mats.push_back(to_cmatrix(e));
                v.effects.push_back(std::move(mats));
            }
            continue;
        }
        v.kind = CVar::Kind::Det;
        std::vector<std::string> names = mechanism_parents(mech);
        for (auto& p : names) v.parents.push_back(resolve(v.id, p));
        if (auto t = std::get_if<TableMechanism>(&mech)) {
            v.table = t->rows;
        } else {
            auto& x = std::get<ExprMechanism>(mech);
            std::vector<Variable> pv;
            for (auto& p : names) pv.push_back({p, m.card(p)});
            for (auto& a : all_assignments(pv))
                v.table.push_back(eval_expr(x.root, [&](const std::string& k) { return a.at(k); }));
        }
    }
    return c;
}

// Advance a mixed-radix odometer over `idx` restricted to allowed values; false when exhausted.
bool advance(std::vector<int>& vals, const std::vector<int>& idx, const std::vector<std::vector<int>>& allowed,
             std::vector<int>& cursor) {
    for (std::size_t k = idx.size(); k-- > 0;) {
        if (++cursor[k] < static_cast<int>(allowed[k].size())) {
            vals[idx[k]] = allowed[k][cursor[k]];
            return true;
        }
        cursor[k] = 0;
        vals[idx[k]] = allowed[k][0];
    }
    return false;
}

struct Solver {
    const Compiled& c;
    std::vector<int> det;    // Det vars in var order
    std::vector<int> order;  // topological order when the Det part is acyclic
    bool acyclic = true;

    explicit Solver(const Compiled& comp) : c(comp) {
        for (std::size_t i = 0; i < c.vars.size(); ++i)
            if (c.vars[i].kind == CVar::Kind::Det) det.push_back(static_cast<int>(i));
        std::vector<int> state(c.vars.size(), 0);
        std::function<bool(int)> visit = [&](int v) {
            if (state[v] == 2) return true;
            if (state[v] == 1) return false;
            state[v] = 1;
            for (int p : c.vars[v].parents)
                if (c.vars[p].kind == CVar::Kind::Det && !visit(p)) return false;
            state[v] = 2;
            order.push_back(v);
            return true;
        };
        for (int v : det)
            if (!visit(v)) {
                acyclic = false;
                order.clear();
                break;
            }
    }

    bool consistent(const std::vector<int>& vals, int v) const {
        return c.vars[v].table[radix_index(c.vars[v].parents, vals, c.vars)] == vals[v];
    }

    // Returns the number of solutions found (capped at 2); the first solution is left in `vals`.
    int solve(std::vector<int>& vals) const {
        if (acyclic) {
            for (int v : order) vals[v] = c.vars[v].table[radix_index(c.vars[v].parents, vals, c.vars)];
            return 1;
        }
        std::vector<int> first;
        int found = 0;
        for (int v : det) vals[v] = 0;
        while (true) {
            bool ok = true;
            for (int v : det)
                if (!consistent(vals, v)) {
                    ok = false;
                    break;
                }
            if (ok) {
                if (++found == 1) first = vals;
                else break;
            }
            std::size_t k = det.size();
            bool more = false;
            while (k-- > 0) {
                if (++vals[det[k]] < c.vars[det[k]].card) {
                    more = true;
                    break;
                }
                vals[det[k]] = 0;
            }
            if (!more) break;
        }
        if (found >= 1) vals = first;
        return found;
    }
};

}  // namespace

std::optional<Rational> snap_rational(double x, long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    double target = x;
    bool neg = target < 0;
    if (neg) target = -target;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = target;
    std::optional<Rational> best;
    for (int iter = 0; iter < 64; ++iter) {
        double a_f = std::floor(r);
        if (a_f > 1e15) break;
        long a = static_cast<long>(a_f);
        long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::fabs(static_cast<double>(p1) / static_cast<double>(q1) - target) <= tol) {
            Rational v(neg ? -p1 : p1, static_cast<unsigned long>(q1));
            v.canonicalize();
            return v;
        }
        double frac = r - a_f;
        if (frac < 1e-18) break;
        r = 1.0 / frac;
    }
    return best;
}

Evaluation evaluate(const CausalModel& m, const Assignment& interventions) {
    Compiled c = compile(m, interventions);
    Solver solver(c);
    const bool quantum = !c.latents.empty();
    const std::size_t nv = c.vars.size();

    std::vector<int> exo, meas;
    std::vector<std::vector<int>> exo_allowed, meas_allowed;
    for (std::size_t i = 0; i < nv; ++i) {
        if (c.vars[i].kind == CVar::Kind::Exo) {
            std::vector<int> support;
            for (int k = 0; k < c.vars[i].card; ++k)
                if (c.vars[i].prior[static_cast<std::size_t>(k)] > 0) support.push_back(k);
            exo.push_back(static_cast<int>(i));
            exo_allowed.push_back(support);
        } else if (c.vars[i].kind == CVar::Kind::Meas) {
            std::vector<int> all(static_cast<std::size_t>(c.vars[i].card));
            for (int k = 0; k < c.vars[i].card; ++k) all[static_cast<std::size_t>(k)] = k;
            meas.push_back(static_cast<int>(i));
            meas_allowed.push_back(all);
        }
    }

    std::vector<Variable> all_vars;
    for (auto& v : c.vars) all_vars.push_back({v.id, v.card});
    std::size_t total = 1;
    for (auto& v : all_vars) total *= static_cast<std::size_t>(v.card);
    std::vector<Rational> exact(quantum ? 0 : total, Rational(0));
    std::vector<double> numeric(quantum ? total : 0, 0.0);
    auto encode = [&](const std::vector<int>& vals) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < nv; ++i) idx = idx * static_cast<std::size_t>(c.vars[i].card) + static_cast<std::size_t>(vals[i]);
        return idx;
    };

    std::vector<int> vals(nv, 0);
    std::vector<int> exo_cursor(exo.size(), 0), meas_cursor(meas.size(), 0);
    for (std::size_t k = 0; k < exo.size(); ++k) vals[exo[k]] = exo_allowed[k][0];
    do {
        Rational prior = 1;
        for (int e : exo) prior *= c.vars[e].prior[static_cast<std::size_t>(vals[e])];
        std::fill(meas_cursor.begin(), meas_cursor.end(), 0);
        for (std::size_t k = 0; k < meas.size(); ++k) vals[meas[k]] = 0;
        do {
            int n_sol = solver.solve(vals);
            if (n_sol != 1) {
                std::map<std::string, int> at;
                for (int e : exo) at[c.vars[e].id] = vals[e];
                for (int q : meas) at[c.vars[q].id] = vals[q];
                std::string desc;
                for (auto& [k, v] : at) desc += (desc.empty() ? "" : ", ") + k + "=" + std::to_string(v);
                if (n_sol == 0) throw Error(ErrorKind::Inconsistent, "no solution for " + desc, at);
                throw Error(ErrorKind::NonUnique, "several solutions for " + desc, at);
            }
            if (!quantum) {
                exact[encode(vals)] += prior;
                continue;
            }
            double w = prior.get_d();
            for (std::size_t q = 0; q < c.latents.size() && w != 0.0; ++q) {
                std::vector<std::pair<std::vector<int>, CMatrix>> effs;
                for (int mv : meas) {
                    const CVar& v = c.vars[mv];
                    if (v.quantum != static_cast<int>(q)) continue;
                    int setting = radix_index(v.parents, vals, c.vars);
                    effs.emplace_back(v.factors, v.effects[static_cast<std::size_t>(setting)][static_cast<std::size_t>(vals[mv])]);
                }
                if (!effs.empty()) w *= born_probability(c.latents[q], effs);
            }
            numeric[encode(vals)] += w;
        } while (advance(vals, meas, meas_allowed, meas_cursor));
    } while (advance(vals, exo, exo_allowed, exo_cursor));

    // Post-selection on star == source, then drop the stars.
    const std::size_t nc = c.n_classical;
    std::vector<Variable> cvars(all_vars.begin(), all_vars.begin() + static_cast<long>(nc));
    std::size_t ctotal = 1;
    for (auto& v : cvars) ctotal *= static_cast<std::size_t>(v.card);
    std::vector<Rational> cexact(quantum ? 0 : ctotal, Rational(0));
    std::vector<double> cnum(ctotal, 0.0);
    JointDistribution all_shape = JointDistribution::uniform(all_vars);
    Rational mass = 0;
    double nmass = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        if (quantum ? numeric[i] == 0.0 : exact[i] == 0) continue;
        auto v = all_shape.decode(i);
        bool keep = true;
        for (std::size_t k = nc; k < nv; ++k)
            if (v[k] != v[static_cast<std::size_t>(c.vars[k].star_of)]) keep = false;
        if (!keep) continue;
        std::size_t ci = 0;
        for (std::size_t k = 0; k < nc; ++k) ci = ci * static_cast<std::size_t>(cvars[k].card) + static_cast<std::size_t>(v[k]);
        if (quantum) {
            cnum[ci] += numeric[i];
            nmass += numeric[i];
        } else {
            cexact[ci] += exact[i];
            mass += exact[i];
        }
    }

    Evaluation out;
    out.quantum = quantum;
    if (!quantum) {
        if (mass == 0) throw Error(ErrorKind::ZeroPostSelection, "post-selected event has probability 0");
        for (auto& x : cexact) x /= mass;
        for (std::size_t i = 0; i < ctotal; ++i) cnum[i] = cexact[i].get_d();
        out.exact = JointDistribution(cvars, std::move(cexact));
        out.numeric = std::move(cnum);
        return out;
    }
    if (nmass <= 1e-15) throw Error(ErrorKind::ZeroPostSelection, "post-selected event has probability 0");
    std::vector<Rational> snapped(ctotal);
    Rational sum = 0;
    for (std::size_t i = 0; i < ctotal; ++i) {
        cnum[i] /= nmass;
        auto q = snap_rational(cnum[i]);
        if (!q || *q < 0)
            throw Error(ErrorKind::NonRationalProbability,
                        "probability " + std::to_string(cnum[i]) + " has no rational form with denominator <= 2^20");
        snapped[i] = *q;
        sum += *q;
    }
    if (sum != 1) throw Error(ErrorKind::NonRationalProbability, "snapped probabilities do not sum exactly to 1");
    out.exact = JointDistribution(cvars, std::move(snapped));
    out.numeric = std::move(cnum);
    return out;
}

JointDistribution full_distribution(const CausalModel& m, const Assignment& interventions) {
    return evaluate(m, interventions).exact;
}

JointDistribution observed_distribution(const CausalModel& m) {
    return marginal(evaluate(m).exact, m.graph.observed());
}

std::vector<double> observed_distribution_numeric(const CausalModel& m) {
    Evaluation ev = evaluate(m);
    JointDistribution obs = marginal(ev.exact, m.graph.observed());
    std::vector<int> pos;
    for (auto& v : obs.variables()) pos.push_back(ev.exact.position(v.id));
    std::vector<double> out(obs.size(), 0.0);
    std::vector<int> sub(pos.size());
    for (std::size_t i = 0; i < ev.exact.size(); ++i) {
        auto vals = ev.exact.decode(i);
        for (std::size_t k = 0; k < pos.size(); ++k) sub[k] = vals[pos[k]];
        out[obs.encode(sub)] += ev.numeric[i];
    }
    return out;
}

JointDistribution do_distribution(const CausalModel& m, const Assignment& interventions) {
    return marginal(evaluate(m, interventions).exact, m.graph.observed());
}

}  // namespace ccm

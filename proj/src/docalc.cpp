#include "ccm/affects.hpp"
#include "ccm/error.hpp"

namespace ccm {

namespace {

Assignment merge(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    out.insert(b.begin(), b.end());
    return out;
}

}  // namespace

bool do_rule_antecedent(const CausalGraph& g, int rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                        const NodeSet& w) {
    require_disjoint({&x, &y, &z, &w});
    if (y.empty() || z.empty()) throw Error(ErrorKind::InvalidInput, "do-calculus rules need nonempty Y and Z");
    const NodeSet xw = set_union(x, w);
    switch (rule) {
        case 1: return d_separated(mutilate(g, x, {}), y, z, xw);
        case 2: return d_separated(mutilate(g, x, z), y, z, xw);
        case 3: {
            // Z(W): members of Z that are not ancestors of W once X's incoming edges are cut.
            NodeSet zw = z_not_ancestors_of_w(mutilate(g, x, {}), z, w);
            return d_separated(mutilate(g, set_union(x, zw), {}), y, z, xw);
        }
        default: throw Error(ErrorKind::InvalidInput, "rule must be 1, 2 or 3");
    }
}

DoCalcResult do_calculus_verify(Analyzer& a, int rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                                const NodeSet& w) {
    DoCalcResult r;
    r.antecedent = do_rule_antecedent(a.model().graph, rule, x, y, z, w);
    if (!r.antecedent) return r;
    const CausalModel& m = a.model();
    bool equal = true;
    for (auto& xa : assignments_of(m, x))
        for (auto& za : assignments_of(m, z))
            for (auto& wa : assignments_of(m, w)) {
                std::optional<JointDistribution> lhs, rhs;
                Assignment xz = merge(xa, za);
                if (rule == 1) {
                    lhs = a.do_conditional(xa, merge(xz, wa), y);
                    rhs = a.do_conditional(xa, merge(xa, wa), y);
                } else if (rule == 2) {
                    lhs = a.do_conditional(xz, merge(xz, wa), y);
                    rhs = a.do_conditional(xa, merge(xz, wa), y);
                } else {
                    lhs = a.do_conditional(xz, merge(xz, wa), y);
                    rhs = a.do_conditional(xa, merge(xa, wa), y);
                }
                if (lhs && rhs && !(*lhs == *rhs)) equal = false;
            }
    r.equality = equal;
    return r;
}

DoCalcResult do_calculus_verify(const CausalModel& m, int rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                                const NodeSet& w) {
    Analyzer a(m);
    return do_calculus_verify(a, rule, x, y, z, w);
}

const char* proof_name(NonAffectsProof p) {
    switch (p) {
        case NonAffectsProof::SourceSeparated: return "source-separated";
        case NonAffectsProof::JointSeparated: return "joint-separated";
        case NonAffectsProof::IgnoredAction: return "ignored-action";
    }
    return "?";
}

std::optional<NonAffectsProof> graphical_nonaffects(const CausalGraph& g, const NodeSet& x, const NodeSet& y,
                                                    const NodeSet& z, const NodeSet& w) {
    require_disjoint({&x, &y, &z, &w});
    if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidInput, "affects relation needs nonempty source and target");
    if (z.empty() && w.empty() && d_separated(mutilate(g, x, {}), x, y, {})) return NonAffectsProof::SourceSeparated;
    const NodeSet xz = set_union(x, z);
    // Separation in G_do(XZ) alone is not enough: Y may still reach W through X or Z in the
    // unintervened graph, so the do(Z) side must be separated as well.
    if (d_separated(mutilate(g, xz, {}), set_union(xz, w), y, {}) &&
        d_separated(mutilate(g, z, {}), set_union(z, w), y, {}))
        return NonAffectsProof::JointSeparated;
    // Ignoring the action on X: (Y _|_ X | ZW) with incoming edges cut on Z and on X(W),
    // the members of X that are not ancestors of W once Z's incoming edges are cut.
    NodeSet xw = z_not_ancestors_of_w(mutilate(g, z, {}), x, w);
    if (d_separated(mutilate(g, set_union(z, xw), {}), y, x, set_union(z, w))) return NonAffectsProof::IgnoredAction;
    return std::nullopt;
}

}  // namespace ccm

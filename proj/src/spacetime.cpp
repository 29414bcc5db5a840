#include "ccm/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ccm/error.hpp"

namespace ccm {

std::string location_text(const Location& l) {
    if (!l.element.empty()) return l.element;
    std::string s = "(";
    for (std::size_t i = 0; i < l.point.size(); ++i) s += (i ? ", " : "") + rational_text(l.point[i]);
    return s + ")";
}

Location point(std::initializer_list<Rational> coords) { return Location{"", Point(coords)}; }
Location element(const std::string& id) { return Location{id, {}}; }

// ---- posets -------------------------------------------------------------------------------------

Poset Poset::finite(std::vector<std::string> elements, std::vector<std::pair<std::string, std::string>> covers) {
    Poset p;
    p.kind_ = Kind::Finite;
    p.dims_ = 0;
    std::set<std::string> seen;
    for (auto& e : elements) {
        if (e.empty()) throw Error(ErrorKind::InvalidInput, "poset element ids must be nonempty");
        if (!seen.insert(e).second) throw Error(ErrorKind::InvalidInput, "duplicate poset element '" + e + "'");
    }
    p.elements_ = std::move(elements);
    p.covers_ = std::move(covers);
    const std::size_t n = p.elements_.size();
    p.leq_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) p.leq_[i][i] = true;
    for (auto& [a, b] : p.covers_) p.leq_[p.element_index(a)][p.element_index(b)] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (p.leq_[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (p.leq_[k][j]) p.leq_[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (p.leq_[i][j] && p.leq_[j][i])
                throw Error(ErrorKind::InvalidInput, "cover relation has a cycle through '" + p.elements_[i] + "' and '" +
                                                         p.elements_[j] + "'");
    return p;
}

Poset Poset::minkowski(int spatial_dims) {
    if (spatial_dims < 1) throw Error(ErrorKind::InvalidInput, "Minkowski space-time needs at least one spatial dimension");
    Poset p;
    p.kind_ = Kind::Minkowski;
    p.dims_ = spatial_dims;
    return p;
}

int Poset::element_index(const std::string& e) const {
    auto it = std::find(elements_.begin(), elements_.end(), e);
    if (it == elements_.end()) throw Error(ErrorKind::UnknownElement, "unknown poset element '" + e + "'");
    return static_cast<int>(it - elements_.begin());
}

void Poset::check(const Location& l) const {
    if (kind_ == Kind::Finite) {
        if (l.element.empty() || !l.point.empty())
            throw Error(ErrorKind::UnknownElement, "location " + location_text(l) + " is not an element of the poset");
        element_index(l.element);
        return;
    }
    if (!l.element.empty() || l.point.size() != static_cast<std::size_t>(dims_ + 1))
        throw Error(ErrorKind::UnknownElement, "location " + location_text(l) + " is not a point of M(" +
                                                   std::to_string(dims_) + "+1)");
}

bool Poset::precedes(const Location& a, const Location& b) const {
    check(a);
    check(b);
    if (kind_ == Kind::Finite) return leq_[element_index(a.element)][element_index(b.element)];
    Rational dt = b.point[0] - a.point[0];
    if (dt < 0) return false;
    Rational dx2 = 0;
    for (int i = 1; i <= dims_; ++i) {
        Rational d = b.point[i] - a.point[i];
        dx2 += d * d;
    }
    return dt * dt >= dx2;
}

// ---- future containment -------------------------------------------------------------------------

Location join_1p1(const std::vector<Location>& pts) {
    if (pts.empty()) throw Error(ErrorKind::InvalidInput, "join of an empty set of points");
    Rational u = pts[0].point.at(0) + pts[0].point.at(1), v = pts[0].point[0] - pts[0].point[1];
    for (auto& p : pts) {
        if (p.point.size() != 2) throw Error(ErrorKind::DimensionMismatch, "light-cone join needs (1+1) points");
        u = std::max<Rational>(u, p.point[0] + p.point[1]);
        v = std::max<Rational>(v, p.point[0] - p.point[1]);
    }
    return Location{"", {(u + v) / 2, (u - v) / 2}};
}

namespace {

std::vector<std::string> finite_region(const Poset& p, const std::vector<Location>& a) {
    std::vector<std::string> out;
    for (auto& e : p.elements()) {
        Location l = element(e);
        if (std::all_of(a.begin(), a.end(), [&](const Location& x) { return p.precedes(x, l); })) out.push_back(e);
    }
    return out;
}

bool in_future_of_all(const Poset& p, const std::vector<Location>& a, const Location& l) {
    return std::all_of(a.begin(), a.end(), [&](const Location& x) { return p.precedes(x, l); });
}

// Smallest multiple of 2^-16 whose square is at least q.
Rational sqrt_ceil(const Rational& q) {
    const double scale = 65536.0;
    Rational r(static_cast<long>(std::ceil(std::sqrt(q.get_d()) * scale)) + 1, 65536);
    r.canonicalize();
    while (r * r < q) r += Rational(1, 65536);
    return r;
}

}  // namespace

ContainmentResult future_contained(const Poset& p, const std::vector<Location>& a, const std::vector<Location>& b,
                                   const SamplingConfig& cfg) {
    for (auto& l : a) p.check(l);
    for (auto& l : b) p.check(l);
    if (b.empty()) return {Containment::Contained, std::nullopt};
    if (p.kind() == Poset::Kind::Finite) {
        for (auto& e : finite_region(p, a)) {
            Location l = element(e);
            if (!in_future_of_all(p, b, l)) return {Containment::NotContained, l};
        }
        return {Containment::Contained, std::nullopt};
    }
    if (a.empty()) {
        Point w = b[0].point;
        w[0] -= 1;
        return {Containment::NotContained, Location{"", w}};
    }
    if (p.spatial_dims() == 1) {
        Location j = join_1p1(a);
        for (auto& x : b)
            if (!p.precedes(x, j)) return {Containment::NotContained, j};
        return {Containment::Contained, std::nullopt};
    }
    // Each b lying in the past of some a makes the containment immediate.
    if (std::all_of(b.begin(), b.end(), [&](const Location& x) {
            return std::any_of(a.begin(), a.end(), [&](const Location& y) { return p.precedes(x, y); });
        }))
        return {Containment::Contained, std::nullopt};

    const int d = p.spatial_dims();
    std::vector<double> centre(d, 0.0);
    for (auto& x : a)
        for (int i = 0; i < d; ++i) centre[i] += x.point[i + 1].get_d() / static_cast<double>(a.size());
    double radius = 1.0;
    double t_lo = a[0].point[0].get_d(), t_hi = t_lo;
    for (const auto* set : {&a, &b})
        for (auto& x : *set) {
            double s = 0;
            for (int i = 0; i < d; ++i) s += std::pow(x.point[i + 1].get_d() - centre[i], 2);
            radius = std::max(radius, std::sqrt(s) + 1.0);
            t_lo = std::min(t_lo, x.point[0].get_d());
            t_hi = std::max(t_hi, x.point[0].get_d());
        }
    radius += t_hi - t_lo;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<long> grid(-1024, 1024);
    std::uniform_int_distribution<long> slack(0, 1024);
    const long scale = std::max(1L, static_cast<long>(std::ceil(radius)));
    for (int s = 0; s < cfg.samples; ++s) {
        Point q(d + 1);
        for (int i = 0; i < d; ++i) {
            Rational c(static_cast<long>(std::lround(centre[i] * 1024)), 1024);
            Rational off(grid(rng) * scale, 1024);
            q[i + 1] = c + off;
            q[i + 1].canonicalize();
        }
        // Earliest time at this spatial position inside every cone of A, optionally pushed later.
        Rational t;
        bool first = true;
        for (auto& x : a) {
            Rational dx2 = 0;
            for (int i = 1; i <= d; ++i) dx2 += (q[i] - x.point[i]) * (q[i] - x.point[i]);
            Rational need = x.point[0] + sqrt_ceil(dx2);
            if (first || need > t) t = need;
            first = false;
        }
        if (s % 2 == 1) t += Rational(slack(rng) * scale, 1024);
        q[0] = t;
        q[0].canonicalize();
        Location l{"", q};
        if (!in_future_of_all(p, a, l)) continue;
        if (!in_future_of_all(p, b, l)) return {Containment::NotContained, l};
    }
    return {Containment::Inconclusive, std::nullopt};
}

// ---- embeddings and compatibility ---------------------------------------------------------------

const Location& Embedding::at(const std::string& id) const {
    auto it = locations.find(id);
    if (it == locations.end()) throw Error(ErrorKind::MissingLocation, "variable '" + id + "' has no location");
    return it->second;
}

void Embedding::validate() const {
    for (auto& [id, l] : locations) poset.check(l);
    if (!accessible_future) {
        if (poset.kind() != Poset::Kind::Finite)
            throw Error(ErrorKind::InvalidInput, "explicit accessible regions are only supported on finite posets");
        for (auto& [id, region] : accessible)
            for (auto& e : region) poset.element_index(e);
    }
}

bool imposes_constraint(const AffectsRelation& r) {
    return r.holds && (r.source.size() == 1 || r.irreducible.value_or(false));
}

namespace {

std::vector<Location> locations_of(const Embedding& e, const NodeSet& s) {
    std::vector<Location> out;
    for (auto& id : s) out.push_back(e.at(id));
    return out;
}

// Accessible region of a variable on a finite poset with explicit regions.
std::set<std::string> region_of(const Embedding& e, const std::string& id) {
    auto it = e.accessible.find(id);
    if (it != e.accessible.end()) return {it->second.begin(), it->second.end()};
    auto f = finite_region(e.poset, {e.at(id)});
    return {f.begin(), f.end()};
}

std::set<std::string> region_of(const Embedding& e, const NodeSet& s) {
    std::set<std::string> r(e.poset.elements().begin(), e.poset.elements().end());
    for (auto& id : s) {
        auto ri = region_of(e, id);
        std::set<std::string> keep;
        for (auto& x : r)
            if (ri.count(x)) keep.insert(x);
        r = std::move(keep);
    }
    return r;
}

}  // namespace

CompatReport check_compat(const AffectsSet& a, const Embedding& e, CompatMode mode, const SamplingConfig& cfg) {
    e.validate();
    CompatReport rep;
    rep.mode = mode;
    std::vector<std::string> inconclusive;
    for (auto& r : a.relations) {
        if (!imposes_constraint(r)) continue;
        NodeSet rest = set_union(set_union(r.target, r.do_given), r.obs_given);
        if (mode == CompatMode::Compat && !e.accessible_future) {
            for (auto& id : set_union(r.source, rest)) e.at(id);
            auto rt = region_of(e, rest), rs = region_of(e, r.source);
            for (auto& x : rt)
                if (!rs.count(x)) {
                    rep.violated.push_back({r, element(x)});
                    break;
                }
            continue;
        }
        auto res = future_contained(e.poset, locations_of(e, rest), locations_of(e, r.source), cfg);
        if (res.status == Containment::NotContained) rep.violated.push_back({r, res.witness});
        else if (res.status == Containment::Inconclusive) inconclusive.push_back(relation_text(r));
    }
    rep.compatible = rep.violated.empty();
    if (rep.compatible && !inconclusive.empty())
        throw Error(ErrorKind::InconclusiveGeometry,
                    "could not decide the future containment required by: " + inconclusive.front());
    return rep;
}

EmbeddingClass classify_embedding(const AffectsSet& a, const Embedding& e) {
    EmbeddingClass c;
    for (auto& r : a.relations)
        if (r.holds && r.source.size() == 1 && r.target.size() == 1 && r.do_given.empty() && r.obs_given.empty() &&
            e.at(*r.source.begin()) == e.at(*r.target.begin()))
            c.trivial = true;
    for (auto i = e.locations.begin(); i != e.locations.end(); ++i)
        for (auto j = std::next(i); j != e.locations.end(); ++j)
            if (i->second == j->second) c.degenerate = true;
    return c;
}

double stability_probe(const AffectsSet& a, const Embedding& e, const Rational& eps, int trials, std::uint64_t seed) {
    if (e.poset.kind() != Poset::Kind::Minkowski)
        throw Error(ErrorKind::InvalidInput, "stability probing needs a Minkowski embedding");
    if (trials <= 0) throw Error(ErrorKind::InvalidInput, "trials must be positive");
    if (eps < 0) throw Error(ErrorKind::InvalidInput, "eps must be non-negative");
    const long steps = 1L << 20;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(-steps, steps);
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        Embedding moved = e;
        for (auto& [id, l] : moved.locations)
            for (auto& c : l.point) {
                Rational delta = eps * Rational(dist(rng), steps);
                c += delta;
                c.canonicalize();
            }
        if (check_compat(a, moved).compatible) ++ok;
    }
    return static_cast<double>(ok) / trials;
}

std::pair<AffectsSet, Embedding> augment_with_copies(const AffectsSet& a, const Embedding& e,
                                                     const std::map<std::string, std::vector<Location>>& copies) {
    e.validate();
    AffectsSet out = a;
    Embedding emb = e;
    NodeSet taken = a.elements();
    for (auto& [id, l] : e.locations) taken.insert(id);
    for (auto& [id, points] : copies) {
        const Location& origin = e.at(id);
        int k = 1;
        for (auto& loc : points) {
            e.poset.check(loc);
            bool inside = e.accessible_future || e.poset.kind() != Poset::Kind::Finite
                              ? e.poset.precedes(origin, loc)
                              : region_of(e, id).count(loc.element) > 0;
            if (!inside)
                throw Error(ErrorKind::CopyOutsideAccessible,
                            "copy of '" + id + "' at " + location_text(loc) + " lies outside its accessible region");
            std::string name;
            do {
                name = id + "'" + (k == 1 ? std::string() : std::to_string(k));
                ++k;
            } while (taken.count(name));
            taken.insert(name);
            emb.locations[name] = loc;
            if (!e.accessible_future) {
                auto future = finite_region(e.poset, {loc});
                auto reg = region_of(e, id);
                std::vector<std::string> acc;
                for (auto& x : future)
                    if (reg.count(x)) acc.push_back(x);
                emb.accessible[name] = acc;
            }
            AffectsRelation r;
            r.source = {id};
            r.target = {name};
            r.holds = true;
            r.irreducible = true;
            out.relations.push_back(r);
        }
    }
    return {out, emb};
}

bool ejam_check(const Embedding& e, const JamRoles& roles, const SamplingConfig& cfg) {
    const Poset& p = e.poset;
    const std::vector<std::vector<std::string>> blocks{{roles.a, roles.x}, {roles.b, roles.y}, {roles.c, roles.z}};
    for (auto& blk : blocks)
        if (!p.precedes(e.at(blk[0]), e.at(blk[1]))) return false;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            for (auto& u : blocks[i])
                for (auto& v : blocks[j]) {
                    const Location &lu = e.at(u), &lv = e.at(v);
                    if (lu == lv || p.precedes(lu, lv) || p.precedes(lv, lu)) return false;
                }
    auto res = future_contained(p, {e.at(roles.x), e.at(roles.z)}, {e.at(roles.b)}, cfg);
    if (res.status == Containment::Inconclusive)
        throw Error(ErrorKind::InconclusiveGeometry, "could not decide whether the joint future of " + roles.x +
                                                         " and " + roles.z + " lies in the future of " + roles.b);
    return res.status == Containment::Contained;
}

}  // namespace ccm

#include "wander/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wander {

MapSpec MapSpec::prior_stage(std::shared_ptr<const Polynomial> p) {
    if (!p) throw UnresolvedPriorStage("prior stage map is missing");
    MapSpec m;
    m.kind = Kind::prior;
    m.prior = std::move(p);
    return m;
}

cplx MapSpec::operator()(cplx z) const {
    switch (kind) {
    case Kind::linear: return s * z;
    case Kind::constant: return c;
    case Kind::translation: return z + c;
    case Kind::affine: return c + s * (z - q);
    case Kind::prior: return (*prior)(z);
    }
    return {};
}

cplx MapSpec::derivative(cplx z) const {
    switch (kind) {
    case Kind::linear: return s;
    case Kind::constant: return 0.0;
    case Kind::translation: return 1.0;
    case Kind::affine: return s;
    case Kind::prior: return prior->derivative(z);
    }
    return {};
}

std::string MapSpec::tag() const {
    switch (kind) {
    case Kind::linear: return "linear";
    case Kind::constant: return "constant";
    case Kind::translation: return "translation";
    case Kind::affine: return "affine";
    case Kind::prior: return "prior";
    }
    return {};
}

PiecewiseModel::PiecewiseModel(std::vector<Entry> entries, double tol) : entries_(std::move(entries)), tol_(tol) {
    for (const auto& e : entries_)
        if (e.map.kind == MapSpec::Kind::prior && !e.map.prior) throw UnresolvedPriorStage(e.name);
    for (std::size_t a = 0; a < entries_.size(); ++a)
        for (std::size_t b = a + 1; b < entries_.size(); ++b)
            if (region_distance(entries_[a].region, entries_[b].region, 256) <= 0.0)
                throw OverlapDetected(entries_[a].name + " meets " + entries_[b].name);
}

int PiecewiseModel::locate(cplx z) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].region.contains(z, tol_)) return static_cast<int>(i);
    return -1;
}

cplx PiecewiseModel::evaluate(cplx z) const {
    int i = locate(z);
    if (i < 0) throw OutsideDomain(z);
    return entries_[i].map(z);
}

cplx PiecewiseModel::derivative(cplx z) const {
    int i = locate(z);
    if (i < 0) throw OutsideDomain(z);
    return entries_[i].map.derivative(z);
}

double PiecewiseModel::min_separation(int samples) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < entries_.size(); ++a)
        for (std::size_t b = a + 1; b < entries_.size(); ++b)
            d = std::min(d, region_distance(entries_[a].region, entries_[b].region, samples));
    return d;
}

Region affine_image(const Region& r, cplx a, cplx b) {
    switch (r.kind()) {
    case Region::Kind::disk: return Region::disk(a * r.center() + b, std::abs(a) * r.radius());
    case Region::Kind::polygonal_hull: {
        std::vector<cplx> v;
        v.reserve(r.vertices().size());
        for (auto z : r.vertices()) v.push_back(a * z + b);
        return Region::polygonal_hull(std::move(v));
    }
    case Region::Kind::translate:
        if (a == cplx(1.0)) return r.base().translated(r.offset() + b);
        return affine_image(r.base(), a, a * r.offset() + b);
    case Region::Kind::finite_union: {
        std::vector<Region> parts;
        for (const auto& p : r.parts()) parts.push_back(affine_image(p, a, b));
        return Region::finite_union(std::move(parts));
    }
    case Region::Kind::annular_sector: {
        if (a == cplx(1.0)) return r.translated(b);
        std::vector<cplx> v;
        for (auto z : r.boundary_curves(512).front()) v.push_back(a * z + b);
        return Region::polygonal_hull(std::move(v));
    }
    }
    throw InvalidRegion("affine image of unknown region");
}

PiecewiseModel phi0(const Constants& c, const Schedule& s) {
    std::vector<PiecewiseModel::Entry> e;
    e.push_back({"D", c.D(), MapSpec::phi()});
    e.push_back({"A", c.A(), MapSpec::constant(-0.25)});
    for (long k = 0; k <= s.m(1) - 2; ++k)
        e.push_back({"B0+" + std::to_string(k), c.B0().translated(double(k)), MapSpec::tau()});
    return PiecewiseModel(std::move(e));
}

PiecewiseModel phi_j(std::shared_ptr<const Polynomial> prev, const StagePieces& pieces, const MapSpec& h,
                     bool use_full_delta) {
    if (!prev) throw UnresolvedPriorStage("phi_j needs the previous stage");
    if (h.kind != MapSpec::Kind::affine) throw InfeasibleContraction("h must be affine");
    std::vector<PiecewiseModel::Entry> e;
    MapSpec keep = MapSpec::prior_stage(prev);
    if (use_full_delta) {
        e.push_back({"Delta", pieces.delta, keep});
    } else {
        for (const auto& p : pieces.prior_pieces) e.push_back({p.name, p.region, keep});
    }
    for (std::size_t i = 0; i < pieces.V.size(); ++i)
        e.push_back({"V" + std::to_string(i), pieces.V[i], MapSpec::constant(-0.25)});
    e.push_back({"Q", pieces.Q, h});
    for (std::size_t k = 0; k < pieces.B_translates.size(); ++k)
        e.push_back({"B+" + std::to_string(k), pieces.B_translates[k], MapSpec::tau()});
    return PiecewiseModel(std::move(e));
}

MapSpec build_contraction(const Region& Q, const Region& C, double image_fraction) {
    cplx q = Q.centroid();
    cplx c = C.centroid();
    double dc = C.signed_distance(c);
    double inr = C.inradius();
    if (!(dc > 0.0) || !(inr > 0.0)) throw InfeasibleContraction("centroid of C is not interior");
    double rq = 0.0;
    for (const auto& ring : Q.boundary_curves(512))
        for (auto z : ring) rq = std::max(rq, std::abs(z - q));
    if (!(rq > 0.0)) throw InfeasibleContraction("Q is degenerate");
    // image radius + 25% of the inradius must stay inside the disk of radius dc about c
    double feasible = (dc - 0.25 * inr) / rq;
    if (!(feasible > 0.0)) throw InfeasibleContraction("C too thin around its centroid");
    double s = std::min({0.5, feasible, image_fraction * std::min(dc, inr) / rq});
    return MapSpec::affine(c, s, q);
}

}  // namespace wander

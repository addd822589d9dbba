#include "wander/branches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wander {

cplx invert_branch(const Polynomial& f, const Region& domain, cplx w, cplx seed, const NewtonOptions& opt) {
    double tol = opt.residual * std::max(1.0, std::abs(w));
    cplx z = seed;
    auto [v, d] = f.with_derivative(z);
    double res = std::abs(v - w);
    int polish = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (d == cplx(0.0)) break;
        cplx step = (v - w) / d;
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
            cplx zn = z - t * step;
            auto [vn, dn] = f.with_derivative(zn);
            double rn = std::abs(vn - w);
            if (rn < res) {
                z = zn, v = vn, d = dn, res = rn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        // a few extra steps once converged, to reach the rounding floor
        if (res <= tol && ++polish > 3) break;
    }
    if (!(res <= tol)) throw NoBranch("Newton did not converge", w);
    double slack = 1e-9 * std::max(1.0, domain.diameter());
    if (!domain.contains(z, slack)) throw NoBranch("preimage outside the branch domain", w);
    return z;
}

namespace {

std::vector<cplx> pull_curve(const std::vector<cplx>& curve, const std::function<cplx(cplx, cplx)>& solve,
                             const std::function<cplx(cplx)>& seed) {
    std::vector<cplx> out;
    out.reserve(curve.size());
    cplx prev{};
    bool have = false;
    for (auto w : curve) {
        cplx z;
        if (have) {
            try {
                z = solve(w, prev);
            } catch (const NoBranch&) {
                z = solve(w, seed(w));
            }
        } else {
            z = solve(w, seed(w));
        }
        out.push_back(z);
        prev = z;
        have = true;
    }
    return out;
}

Region hull_of(std::vector<std::vector<cplx>> rings) {
    if (rings.size() == 1) return Region::polygonal_hull(std::move(rings.front()));
    std::vector<Region> parts;
    for (auto& r : rings) parts.push_back(Region::polygonal_hull(std::move(r)));
    return Region::finite_union(std::move(parts));
}

}  // namespace

Region transport_region(const Polynomial& f, const Region& domain, const Region& target,
                        const std::function<cplx(cplx)>& seed, int samples) {
    auto solve = [&](cplx w, cplx s) { return invert_branch(f, domain, w, s); };
    std::vector<std::vector<cplx>> rings;
    int failures = 0, total = 0;
    for (const auto& curve : target.boundary_curves(samples)) {
        std::vector<cplx> ring;
        cplx prev{};
        bool have = false;
        for (auto w : curve) {
            ++total;
            try {
                cplx z = have ? invert_branch(f, domain, w, prev) : solve(w, seed(w));
                ring.push_back(z);
                prev = z;
                have = true;
            } catch (const NoBranch&) {
                try {
                    cplx z = solve(w, seed(w));
                    ring.push_back(z);
                    prev = z;
                    have = true;
                } catch (const NoBranch&) {
                    ++failures;
                }
            }
        }
        if (!ring.empty()) rings.push_back(std::move(ring));
    }
    if (failures == total) throw EmptyIntersection("target does not meet the image of the domain");
    if (failures > 0) throw NoBranch("target is only partly covered by the image of the domain", target.centroid());
    return hull_of(std::move(rings));
}

cplx InverseChain::operator()(cplx w) const {
    cplx z = w;
    for (const auto& s : steps_) z = invert_branch(*f_, s.domain, z, (z - s.b) / s.a);
    return z;
}

std::vector<cplx> InverseChain::trace(cplx w) const {
    std::vector<cplx> out{w};
    for (const auto& s : steps_) out.push_back(invert_branch(*f_, s.domain, out.back(), (out.back() - s.b) / s.a));
    return out;
}

Region InverseChain::transport(const Region& target, int samples) const {
    std::vector<std::vector<cplx>> rings;
    for (auto curve : target.boundary_curves(samples)) {
        for (const auto& s : steps_) {
            auto solve = [&](cplx w, cplx seed) { return invert_branch(*f_, s.domain, w, seed); };
            auto guess = [&](cplx w) { return (w - s.b) / s.a; };
            curve = pull_curve(curve, solve, guess);
        }
        rings.push_back(std::move(curve));
    }
    return hull_of(std::move(rings));
}

InverseChain branch_G(const Polynomial& f, const Region& D, int n) {
    if (n < 0) throw std::invalid_argument("branch_G needs n >= 0");
    std::vector<InverseChain::Step> steps;
    for (int i = 0; i < n; ++i) steps.push_back({"D", D, 3.0, 0.0});
    return InverseChain(f, std::move(steps));
}

InverseChain branch_F(const Polynomial& f, const std::vector<Region>& bands) {
    std::vector<InverseChain::Step> steps;
    for (auto it = bands.rbegin(); it != bands.rend(); ++it) {
        if (!(it->inradius(48) > 0.0)) throw ChainDomainEmpty("empty band piece in the F chain");
        steps.push_back({"band", *it, 1.0, 1.0});
    }
    return InverseChain(f, std::move(steps));
}

PullbackTrace construct_Cj(const std::function<double(cplx)>& inside, const Box& search, const Region& excluded,
                           double margin, const InverseChain& F, const InverseChain& G, int grid) {
    auto room = [&](cplx z) { return std::min(inside(z), -excluded.signed_distance(z) - margin); };
    double best = -std::numeric_limits<double>::infinity();
    cplx at{};
    double hx = (search.x1 - search.x0) / grid, hy = (search.y1 - search.y0) / grid;
    for (int i = 0; i <= grid; ++i)
        for (int k = 0; k <= grid; ++k) {
            cplx z(search.x0 + i * hx, search.y0 + k * hy);
            double r = room(z);
            if (r > best) best = r, at = z;
        }
    // local refinement on shrinking patterns
    for (double step = std::max(hx, hy); step > 1e-6 * std::max(hx, hy); step *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (cplx d : {cplx(step, 0), cplx(-step, 0), cplx(0, step), cplx(0, -step)}) {
                double r = room(at + d);
                if (r > best) best = r, at = at + d, moved = true;
            }
        }
    }
    if (!(best > 0.0)) throw NoRoomForX("no disk fits in E away from the excluded set");
    PullbackTrace t{Region::disk(at, 0.8 * best), Region::disk(at, 0.8 * best), Region::disk(at, 0.8 * best)};
    t.x_radius = best;
    t.clearance = -excluded.signed_distance(at) - 0.8 * best;
    t.FX = F.transport(t.X);
    t.C = G.transport(t.FX);
    return t;
}

PreimageLadder build_preimage_ladder(const Polynomial& f, const Region& D, const Region& B0, int n_max, int samples) {
    PreimageLadder L;
    for (int n = 1; n <= n_max; ++n) {
        Region W = branch_G(f, D, n).transport(B0, samples);
        double rho = 0.0;
        for (const auto& ring : W.boundary_curves(samples))
            for (auto z : ring) rho = std::max(rho, std::abs(z));
        L.pieces.push_back(W);
        L.radii.push_back(rho);
    }
    L.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < L.pieces.size(); ++a)
        for (std::size_t b = a + 1; b < L.pieces.size(); ++b)
            L.min_gap = std::min(L.min_gap, region_distance(L.pieces[a], L.pieces[b], samples));
    L.disjoint = L.pieces.size() < 2 || L.min_gap > 0.0;
    L.shrinking = true;
    for (std::size_t i = 1; i < L.radii.size(); ++i) L.shrinking = L.shrinking && L.radii[i] < L.radii[i - 1];
    return L;
}

}  // namespace wander

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wander/geometry.hpp"
#include "wander/polynomial.hpp"

namespace wander {

struct NoBranch : std::runtime_error {
    cplx point;
    NoBranch(const std::string& what, cplx w) : std::runtime_error(what), point(w) {}
};

struct EmptyIntersection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChainDomainEmpty : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoRoomForX : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NewtonOptions {
    double residual = 1e-10;  // relative to max(1, |w|)
    int max_iterations = 80;
    int max_halvings = 40;
};

// The z in domain with f(z) = w, found by damped Newton from seed.
cplx invert_branch(const Polynomial& f, const Region& domain, cplx w, cplx seed, const NewtonOptions& opt = {});

// Pulls boundary samples of target back through the branch of f on domain, following each curve
// by continuation. seed gives a first guess for the first sample of every curve.
Region transport_region(const Polynomial& f, const Region& domain, const Region& target,
                        const std::function<cplx(cplx)>& seed, int samples = 512);

// Composition of inverse branches; step i inverts f on domains[i] with seed (w - b_i) / a_i.
class InverseChain {
public:
    struct Step {
        std::string name;
        Region domain;
        cplx a{1};
        cplx b{};
    };

    InverseChain(const Polynomial& f, std::vector<Step> steps) : f_(&f), steps_(std::move(steps)) {}

    cplx operator()(cplx w) const;
    // Every intermediate point, starting with w.
    std::vector<cplx> trace(cplx w) const;
    Region transport(const Region& target, int samples = 512) const;
    const std::vector<Step>& steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }

private:
    const Polynomial* f_;
    std::vector<Step> steps_;
};

// n-fold branch of f^{-1} staying in D.
InverseChain branch_G(const Polynomial& f, const Region& D, int n);

// Chain back through the band pieces, last piece first. bands lists the pieces in forward order.
InverseChain branch_F(const Polynomial& f, const std::vector<Region>& bands);

struct PullbackTrace {
    Region X;
    Region FX;
    Region C;
    double x_radius = 0.0;  // before shrinking
    double clearance = 0.0; // distance from X to the excluded set
};

// Largest disk where inside(z) > 0 and clear of excluded by margin, shrunk by 20%, pulled back by F then G.
PullbackTrace construct_Cj(const std::function<double(cplx)>& inside, const Box& search, const Region& excluded,
                           double margin, const InverseChain& F, const InverseChain& G, int grid = 96);

struct PreimageLadder {
    std::vector<Region> pieces;   // W_1 .. W_n
    std::vector<double> radii;    // rho_n = max |z| over W_n
    double min_gap = 0.0;         // smallest distance between distinct pieces
    bool disjoint = false;
    bool shrinking = false;
};

// W_n is the D-branch pullback of B0 by f^n.
PreimageLadder build_preimage_ladder(const Polynomial& f, const Region& D, const Region& B0, int n_max,
                                     int samples = 512);

}  // namespace wander

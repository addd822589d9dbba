#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wander/geometry.hpp"
#include "wander/polynomial.hpp"
#include "wander/schedule.hpp"

namespace wander {

struct OutsideDomain : std::domain_error {
    cplx point;
    explicit OutsideDomain(cplx z) : std::domain_error("point outside the model domain"), point(z) {}
};

struct OverlapDetected : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InfeasibleContraction : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnresolvedPriorStage : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MapSpec {
    enum class Kind { linear, constant, translation, affine, prior };
    Kind kind = Kind::linear;
    cplx c{};   // constant value, or affine image centre
    cplx s{1};  // affine scale (or linear factor)
    cplx q{};   // affine source centre
    std::shared_ptr<const Polynomial> prior;

    static MapSpec phi() { return {Kind::linear, 0.0, 3.0, 0.0, nullptr}; }
    static MapSpec constant(cplx v) { return {Kind::constant, v, 0.0, 0.0, nullptr}; }
    static MapSpec tau() { return {Kind::translation, 1.0, 1.0, 0.0, nullptr}; }
    // z -> c + s (z - q)
    static MapSpec affine(cplx c, cplx s, cplx q) { return {Kind::affine, c, s, q, nullptr}; }
    static MapSpec prior_stage(std::shared_ptr<const Polynomial> p);

    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    bool is_contraction() const { return kind == Kind::affine && std::abs(s) > 0 && std::abs(s) < 1; }
    std::string tag() const;
};

class PiecewiseModel {
public:
    struct Entry {
        std::string name;
        Region region;
        MapSpec map;
    };

    PiecewiseModel() = default;
    explicit PiecewiseModel(std::vector<Entry> entries, double tol = 1e-9);

    // Value of the first piece containing z within tol.
    cplx operator()(cplx z) const { return evaluate(z); }
    cplx evaluate(cplx z) const;
    cplx derivative(cplx z) const;
    // Index of the piece used for z, or -1.
    int locate(cplx z) const;
    const std::vector<Entry>& entries() const { return entries_; }
    double tolerance() const { return tol_; }
    // Smallest mutual distance between pieces (positive when disjoint).
    double min_separation(int samples = 512) const;

private:
    std::vector<Entry> entries_;
    double tol_ = 1e-9;
};

// Closed affine image z -> a z + b of a region.
Region affine_image(const Region& r, cplx a, cplx b);

PiecewiseModel phi0(const Constants& c, const Schedule& s);

struct StagePieces {
    Region delta;                 // Delta_j, on which the prior stage is kept
    std::vector<Region> V;        // neighbourhoods of the P images
    Region Q;
    std::vector<Region> B_translates;
    std::vector<PiecewiseModel::Entry> prior_pieces;  // when Delta_j is replaced by the earlier pieces
};

PiecewiseModel phi_j(std::shared_ptr<const Polynomial> prev, const StagePieces& pieces, const MapSpec& h,
                     bool use_full_delta);

// Affine contraction h with h(centroid Q) = centroid C and h(Q) well inside C.
MapSpec build_contraction(const Region& Q, const Region& C, double image_fraction = 0.15);

}  // namespace wander

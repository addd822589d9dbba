#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wander/geometry.hpp"
#include "wander/polynomial.hpp"

namespace wander {

using Target = std::function<cplx(cplx)>;
// Value and derivative.
using Holomorphic = std::function<std::pair<cplx, cplx>(cplx)>;

struct Piece {
    std::string name;
    Region region;
    Target target;
    double tolerance = 0.0;  // 0 means the task epsilon
    double weight = 1.0;
    bool guard = false;  // kept loosely near target, not part of the certified set
};

struct Constraint {
    cplx point;
    cplx value;
    std::optional<cplx> derivative;
};

struct ApproximationTask {
    std::vector<Piece> pieces;
    std::vector<Constraint> constraints;
    double epsilon = 1e-6;
};

struct ApproxOptions {
    int max_degree = 1600;
    int samples_per_piece = 1024;
    int validation_factor = 2;
    double safety = 1.5;
    // Stop once the validation error is below this fraction of tolerance/safety.
    double headroom = 0.7;
    // Give up once the worst ratio exceeds the best seen by this factor (loss of orthogonality).
    double breakdown_factor = 100.0;
    std::function<void(int degree, double worst_ratio)> progress;
};

struct ErrorCertificate {
    std::vector<std::string> names;
    std::vector<double> certified;  // safety x sup on the validation grid
    std::vector<double> measured;   // raw sup
    std::vector<double> tolerance;
    std::vector<bool> guard;
    int grid_density = 0;
    double safety = 1.5;
    bool doubling_agrees = false;

    bool passes() const;
    double worst_certified(bool include_guards = false) const;
};

struct UnivalenceCertificate {
    Region region;
    double mu = 0.0;  // min |p'| over the grid
    bool winding_ok = false;
    bool granted = false;
    cplx witness{};
    int probes = 0;
};

struct ApproxResult {
    Polynomial poly;
    ErrorCertificate certificate;
    int degree = 0;
    double seconds = 0.0;
    double constraint_residual = 0.0;
};

struct DegreeBudgetExceeded : std::runtime_error {
    ApproxResult best;
    DegreeBudgetExceeded(const std::string& what, ApproxResult b) : std::runtime_error(what), best(std::move(b)) {}
};

struct ConstraintConflict : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CertificationFailed : std::runtime_error {
    cplx witness;
    CertificationFailed(const std::string& what, cplx w) : std::runtime_error(what), witness(w) {}
};

struct NoFeasibleEpsilon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ApproxResult approximate(const ApproximationTask& task, const ApproxOptions& opt = {});

double certify_error(const Polynomial& p, const Piece& piece, int grid_density, double safety = 1.5);
ErrorCertificate certify_task(const Polynomial& p, const ApproximationTask& task, int grid_density,
                              double safety = 1.5);

// Grants iff min |p'| over a grid exceeds bound and the boundary image winds once around every probe.
UnivalenceCertificate certify_univalence(const Polynomial& p, const Region& r, int probe_count = 64,
                                         double bound = 0.0, int grid = 64);
UnivalenceCertificate certify_univalence(const Holomorphic& map, const Region& r, int probe_count = 64,
                                         double bound = 0.0, int grid = 64);
// Throwing variant: CertificationFailed carries the witness.
UnivalenceCertificate require_univalence(const Polynomial& p, const Region& r, int probe_count = 64,
                                         double bound = 0.0, int grid = 64);

struct Claim {
    std::string name;
    // Worst-case margin of the claim when every map in the chain is perturbed by up to eps.
    std::function<double(double eps)> margin;
};

// Halves from eps_cap until every claim keeps margin >= 2 eps.
double epsilon_search(const std::vector<Claim>& claims, double eps_cap, double floor = 1e-12);

// Hermite interpolant of the constraints and the vanishing factor prod (z - l)^mult.
Polynomial hermite_interpolant(const std::vector<Constraint>& cs);
Polynomial vanishing_factor(const std::vector<Constraint>& cs);

}  // namespace wander

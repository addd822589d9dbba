#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wander/approx.hpp"
#include "wander/branches.hpp"
#include "wander/geometry.hpp"
#include "wander/models.hpp"
#include "wander/polynomial.hpp"
#include "wander/schedule.hpp"

namespace wander {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PlacementInfeasible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StageFailed : std::runtime_error {
    int stage;
    StageFailed(int j, const std::string& why)
        : std::runtime_error("stage " + std::to_string(j) + ": " + why), stage(j) {}
};

struct Shape {
    enum class Kind { disk, square, polygon };
    Kind kind = Kind::disk;
    cplx center{};
    double radius = 1.0;          // disk radius, or half side of the square
    std::vector<cplx> vertices;   // polygon
    bool placed = false;          // already in final coordinates

    Region region() const;
};

struct BuildConfig {
    // schedule: either lambda with m_offset, or explicit lists
    std::optional<double> lambda;
    long long m_offset = 1;
    std::vector<long long> n_list, m_list;

    int stages = 2;
    Shape shape;
    Constants constants;

    double fill = 0.7;           // K0 radius as a fraction of the window inradius
    double delta_ratio = 30.0;   // delta_0 over the radius of the placed shape
    double shrink = 0.125;       // delta_{j+1} / delta_j
    double l_gap = 0.05;         // L_j sits this far from K_j, as a fraction of delta_{j-1} - delta_j
    double guard_tolerance = 0.05;
    bool full_delta = false;
    double image_fraction = 0.15;
    double x_margin = 0.25;      // clearance of X from the excluded blob, in blob inradii

    std::vector<int> max_degree{1200, 2000, 3200};
    int samples_per_piece = 1024;
    double safety = 1.5;
    int boundary_samples = 1024;
    int interior_grid = 64;
    int claim_samples = 128;
    std::string precision = "binary64";

    static BuildConfig defaults();
    static BuildConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    Schedule schedule() const;
    int max_degree_for(int j) const;
};

struct SeedDomain {
    Shape shape;
    Region core;          // closure of the placed U
    cplx scale{1}, shift{};  // placement z -> scale z + shift
    double delta0 = 0.0;
    double shrink = 0.5;
    Region window;
    double l_gap = 0.5;

    double delta(int j) const;
};

SeedDomain normalize_seed(const Shape& shape, const Schedule& s, const Constants& c, double fill = 0.35,
                          double delta_ratio = 3.0, double shrink = 0.125, double l_gap = 0.5);

struct Compacts {
    Region K;
    PointCloud P;
    std::optional<Region> L;  // j >= 1
};

Compacts nested_compacts(const SeedDomain& sd, int j);

// Closed delta-neighbourhood of a disk or a simple polygon (small delta).
Region neighborhood(const Region& r, double delta);

struct PieceRecord {
    std::string name;
    Region region;
    MapSpec map;
    int prior_stage = -1;  // for prior maps
};

struct StageRecord {
    int j = 0;
    double eps = 0.0;
    std::shared_ptr<const Polynomial> f;
    int degree = 0;
    double seconds = 0.0;
    double constraint_residual = 0.0;

    std::vector<PieceRecord> pieces;  // T_j with the model maps of phi_j
    std::vector<Region> guards;
    std::vector<Region> bands;        // B_j + k
    std::optional<Region> Bhat;
    std::optional<Region> L, Q, C, X, blob;
    std::vector<Region> V;
    std::optional<MapSpec> h;

    ErrorCertificate error;
    std::vector<UnivalenceCertificate> univalence;
    std::vector<NamedCheck> verdicts;
    double delta_sup = 0.0;  // sup of |f_j - f_{j-1}| on Delta_j, measured only

    bool passed() const;
};

struct TailBound {
    int j = 0;
    double measured = 0.0;  // sup over T_j samples of |f_J - f_j|
    double bound = 0.0;     // sum of later stage budgets
    double geometric = 0.0; // (4/3) eps_j
};

struct Construction {
    BuildConfig config;
    Schedule schedule;
    SeedDomain seed;
    std::vector<StageRecord> stages;
    std::vector<TailBound> tail;
    std::optional<std::string> failure;

    explicit Construction(BuildConfig cfg);
    const Polynomial& f() const { return *stages.back().f; }
    int J() const { return static_cast<int>(stages.size()) - 1; }
    // Every band piece of stages 0..j in forward order, starting with B0.
    std::vector<Region> band_chain(int j) const;
    // B_l: the sector for l = 0, X_l afterwards.
    Region B(int l) const;
    PiecewiseModel model(int j) const;
};

using Progress = std::function<void(const std::string&)>;

StageRecord init_stage0(const Construction& ctx, const Progress& log = {});
StageRecord advance_stage(const Construction& ctx, int j, const Progress& log = {});
Construction build(const BuildConfig& cfg, const Progress& log = {});

// Recomputes the verdict table of a stage from the stored data.
std::vector<NamedCheck> stage_verdicts(const Construction& ctx, int j,
                                       std::vector<UnivalenceCertificate>* univalence = nullptr);
std::vector<TailBound> tail_report(const Construction& ctx);

// Helpers shared with the verifier.
std::vector<cplx> forward(const Polynomial& f, std::vector<cplx> pts, long long k);
// Smallest signed distance to dst over f^k of src's boundary samples and interior grid.
double image_margin(const Polynomial& f, long long k, const Region& src, const Region& dst, int boundary = 1024,
                    int interior = 64);
Holomorphic iterate_map(const Polynomial& f, long long k);

nlohmann::json manifest(const Construction& ctx);
Construction load_manifest(const nlohmann::json& j);

}  // namespace wander
